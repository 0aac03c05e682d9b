// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lapa/channel.hpp"
#include "lapa/matrix.hpp"
#include "lapa/pilots.hpp"
#include "lapa/rng.hpp"
#include "lapa/training.hpp"

namespace lapa {

// Detector choices. `normalized_mf` is the per-user combiner
// a_n = ghat_n / (ghat_n^H ghat_n); `pseudo_inverse_zf` is the full
// pseudo-inverse A = Ghat (Ghat^H Ghat)^-1, available as an opt-in variant.
enum class Detector { normalized_mf, pseudo_inverse_zf };

enum class TrainingNoise { awgn, none };

// a_n = ghat_n / ||ghat_n||^2, so a_n^H ghat_n = 1 for any nonzero estimate.
inline std::vector<std::complex<double>> combiner(const ChannelEstimate& estimate, int user) {
  const auto g = estimate.g_hat.col(static_cast<std::size_t>(user));
  const double energy = norm_sq(g);
  if (!(energy > 0.0)) throw std::domain_error("combiner: estimated channel has zero norm");
  std::vector<std::complex<double>> a(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = g[i] / energy;
  return a;
}

namespace detail {

// Solves the Hermitian positive-definite system B X = I via Cholesky;
// used only by the pseudo-inverse variant.
inline CMat hermitian_inverse(CMat b) {
  const std::size_t n = b.rows();
  if (b.cols() != n) throw std::invalid_argument("hermitian_inverse: matrix must be square");

  // In-place lower Cholesky factor.
  for (std::size_t j = 0; j < n; ++j) {
    double diag = b(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(b(j, k));
    if (!(diag > 0.0)) throw std::domain_error("estimated Gram matrix is not positive definite");
    const double root = std::sqrt(diag);
    b(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      std::complex<double> v = b(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= b(i, k) * std::conj(b(j, k));
      b(i, j) = v / root;
    }
  }

  // Forward/backward solves against each canonical basis vector.
  CMat inv(n, n);
  std::vector<std::complex<double>> y(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> v = (i == col) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) v -= b(i, k) * y[k];
      y[i] = v / b(i, i).real();
    }
    for (std::size_t ii = n; ii-- > 0;) {
      std::complex<double> v = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) v -= std::conj(b(k, ii)) * inv(k, col);
      inv(ii, col) = v / b(ii, ii).real();
    }
  }
  return inv;
}

}  // namespace detail

// M x N matrix whose column n is the combiner for user n.
inline CMat build_combiners(const ChannelEstimate& estimate,
                            Detector detector = Detector::normalized_mf) {
  const CMat& g_hat = estimate.g_hat;
  CMat a(g_hat.rows(), g_hat.cols());
  if (detector == Detector::normalized_mf) {
    for (std::size_t n = 0; n < g_hat.cols(); ++n) {
      const auto col = g_hat.col(n);
      const double energy = norm_sq(col);
      if (!(energy > 0.0)) throw std::domain_error("combiner: estimated channel has zero norm");
      auto dst = a.col(n);
      for (std::size_t i = 0; i < col.size(); ++i) dst[i] = col[i] / energy;
    }
    return a;
  }
  return matmul(g_hat, detail::hermitian_inverse(gram(g_hat)));
}

namespace detail {

// p_u |a^H g_n|^2 / (p_u sum_{i!=n} |a^H g_i|^2 + ||a||^2) for a given
// combiner against the true channel columns.
inline double sinr_for_combiner(std::span<const std::complex<double>> a, const CMat& g,
                                double p_u, int user) {
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t i = 0; i < g.cols(); ++i) {
    const double coupling = std::norm(cdot(a, g.col(i)));
    if (static_cast<int>(i) == user)
      signal = coupling;
    else
      interference += coupling;
  }
  return p_u * signal / (p_u * interference + norm_sq(a));
}

}  // namespace detail

inline double instantaneous_sinr(const ChannelEstimate& estimate, const ChannelRealization& chan,
                                 const TrainingConfig& cfg, int user) {
  const auto a = combiner(estimate, user);
  const CMat g = chan.combined();
  if (a.size() != g.rows()) throw std::invalid_argument("combiner/channel dimension mismatch");
  return detail::sinr_for_combiner(a, g, cfg.p_u(), user);
}

struct RateReport {
  std::vector<double> per_user_rate;  // bits/s/Hz, one entry per user
  double sum_rate = 0.0;              // bits/s/Hz, includes the (T-tau)/T overhead factor
  int trials = 0;
};

// (T - tau)/T training-overhead prefactor applied to the rate total.
inline double sum_rate_from_per_user(std::span<const double> per_user_rate, int coherence_t,
                                     int tau) {
  if (coherence_t < 1 || tau < 1 || tau > coherence_t)
    throw std::invalid_argument("coherence interval must satisfy 1 <= tau <= T");
  double total = 0.0;
  for (double r : per_user_rate) total += r;
  return total * static_cast<double>(coherence_t - tau) / static_cast<double>(coherence_t);
}

// Monte Carlo ergodic rates: every trial draws fresh NLOS fading and fresh
// training noise, re-estimates the channel, rebuilds combiners and averages
// log2(1 + SINR). Trial t uses the substream (seed, t), so the report is
// reproducible and independent of scheduling.
inline RateReport ergodic_rates(const UserDrop& drop, const PilotAssignment& assignment,
                                const CellConfig& cell, const TrainingConfig& cfg,
                                int coherence_t, int trials, std::uint64_t seed,
                                Detector detector = Detector::normalized_mf,
                                TrainingNoise training_noise = TrainingNoise::awgn) {
  if (trials < 1) throw std::invalid_argument("ergodic_rates: trials must be >= 1");
  if (assignment.n_users() != drop.size())
    throw std::invalid_argument("assignment/drop user-count mismatch");

  const PilotMatrix pilots = build_pilot_matrix(assignment, drop.size());
  const CMat g_los = los_component(drop, cell);
  const auto betas = large_scale_gains(drop, cell);
  const std::size_t n_users = static_cast<std::size_t>(drop.size());

  std::vector<double> rate_sums(n_users, 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng stream = Rng::from_key(seed, static_cast<std::uint64_t>(trial), StreamTag::fading);
    ChannelRealization chan{g_los, nlos_component(drop, cell, stream), betas};
    const CMat y = training_noise == TrainingNoise::awgn
                       ? received_training(chan, pilots, cfg, stream)
                       : received_training_noise_free(chan, pilots, cfg);
    const ChannelEstimate estimate = ls_estimate(y, chan.g_los, pilots, cfg);
    const CMat combiners = build_combiners(estimate, detector);
    const CMat g = chan.combined();
    for (std::size_t n = 0; n < n_users; ++n) {
      const double sinr =
          detail::sinr_for_combiner(combiners.col(n), g, cfg.p_u(), static_cast<int>(n));
      rate_sums[n] += std::log2(1.0 + sinr);
    }
  }

  RateReport report;
  report.trials = trials;
  report.per_user_rate.resize(n_users);
  for (std::size_t n = 0; n < n_users; ++n)
    report.per_user_rate[n] = rate_sums[n] / static_cast<double>(trials);
  report.sum_rate = sum_rate_from_per_user(report.per_user_rate, coherence_t, assignment.tau());
  return report;
}

}  // namespace lapa
