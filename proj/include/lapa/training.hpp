// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lapa/channel.hpp"
#include "lapa/matrix.hpp"
#include "lapa/pilots.hpp"
#include "lapa/rng.hpp"

namespace lapa {

// Uplink training powers. Noise variance is fixed to one, so p_u is the
// per-user transmit SNR in linear units; the pilot power is p_p = tau * p_u.
class TrainingConfig {
 public:
  TrainingConfig(double p_u, int tau) : p_u_(p_u), tau_(tau), p_p_(static_cast<double>(tau) * p_u) {
    if (!(p_u > 0.0)) throw std::invalid_argument("p_u must be > 0");
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  }

  double p_u() const noexcept { return p_u_; }
  int tau() const noexcept { return tau_; }
  double p_p() const noexcept { return p_p_; }

 private:
  double p_u_;
  int tau_;
  double p_p_;
};

struct ChannelEstimate {
  CMat g_hat;  // M x N, known LOS part plus LS-estimated NLOS part
};

namespace detail {

// G * Phi^T for a canonical pilot matrix: column m is the sum of the channel
// columns of the users in group m, accumulated in ascending user order
// (bit-identical to the dense product).
inline CMat channel_times_phi_t(const CMat& g, const PilotMatrix& pilots) {
  CMat out(g.rows(), static_cast<std::size_t>(pilots.tau()));
  for (int n = 0; n < pilots.n_users(); ++n) {
    auto dst = out.col(static_cast<std::size_t>(pilots.pilot_of(n)));
    const auto src = g.col(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

inline void require_training_shapes(const CMat& g, const PilotMatrix& pilots,
                                    const TrainingConfig& cfg) {
  if (static_cast<int>(g.cols()) != pilots.n_users())
    throw std::invalid_argument("channel/pilot user-count mismatch");
  if (pilots.tau() != cfg.tau()) throw std::invalid_argument("pilot/config tau mismatch");
}

}  // namespace detail

// Received pilot block Y = sqrt(p_p) * G * Phi^T + W, with W entries i.i.d.
// CN(0,1). The noise-free variant exists because several estimation
// identities hold exactly only without noise.
inline CMat received_training_noise_free(const ChannelRealization& chan,
                                         const PilotMatrix& pilots, const TrainingConfig& cfg) {
  const CMat g = chan.combined();
  detail::require_training_shapes(g, pilots, cfg);
  CMat y = detail::channel_times_phi_t(g, pilots);
  y *= std::sqrt(cfg.p_p());
  return y;
}

inline CMat received_training(const ChannelRealization& chan, const PilotMatrix& pilots,
                              const TrainingConfig& cfg, Rng& rng) {
  CMat y = received_training_noise_free(chan, pilots, cfg);
  for (auto& v : y.flat()) v += rng.cnormal();
  return y;
}

// LS estimation with the LOS component known at the receiver:
//   Y_nlos = Y - sqrt(p_p) * G_los * Phi^T
//   Ghat_nlos = Y_nlos * Phi / sqrt(p_p)   (= G_nlos * R_Phi + N / sqrt(p_p))
//   Ghat = G_los + Ghat_nlos
inline ChannelEstimate ls_estimate(const CMat& y, const CMat& chan_los, const PilotMatrix& pilots,
                                   const TrainingConfig& cfg) {
  if (y.cols() != static_cast<std::size_t>(pilots.tau()) || y.rows() != chan_los.rows())
    throw std::invalid_argument("received block shape mismatch");
  detail::require_training_shapes(chan_los, pilots, cfg);

  const double sqrt_pp = std::sqrt(cfg.p_p());
  CMat y_nlos = y;
  {
    CMat los_part = detail::channel_times_phi_t(chan_los, pilots);
    los_part *= sqrt_pp;
    y_nlos -= los_part;
  }

  // Y_nlos * Phi picks the received column of each user's pilot.
  CMat g_hat = chan_los;
  for (int n = 0; n < pilots.n_users(); ++n) {
    auto dst = g_hat.col(static_cast<std::size_t>(n));
    const auto src = y_nlos.col(static_cast<std::size_t>(pilots.pilot_of(n)));
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] / sqrt_pp;
  }
  return {std::move(g_hat)};
}

}  // namespace lapa
