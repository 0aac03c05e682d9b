// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "lapa/geometry.hpp"
#include "lapa/matrix.hpp"
#include "lapa/rng.hpp"

namespace lapa {

// Per-drop Rician channel realization, split into the deterministic LOS part
// and the scattered NLOS part. Column n of g_los is
// sqrt(beta_n * K_n / (K_n + 1)) * steering(theta_n); column n of g_nlos is
// sqrt(beta_n / (K_n + 1)) * w_n with w_n entries i.i.d. CN(0,1).
struct ChannelRealization {
  CMat g_los;
  CMat g_nlos;
  std::vector<double> beta;

  CMat combined() const { return g_los + g_nlos; }
};

inline std::vector<double> large_scale_gains(const UserDrop& drop, const CellConfig& cell) {
  std::vector<double> beta(static_cast<std::size_t>(drop.size()));
  for (int n = 0; n < drop.size(); ++n)
    beta[static_cast<std::size_t>(n)] = pathloss(drop.user(n).r, cell);
  return beta;
}

// Deterministic LOS component; fixed for a drop, reusable across fading
// realizations.
inline CMat los_component(const UserDrop& drop, const CellConfig& cell) {
  const std::size_t m = static_cast<std::size_t>(cell.m_antennas);
  CMat g(m, static_cast<std::size_t>(drop.size()));
  for (int n = 0; n < drop.size(); ++n) {
    const UserLocation& u = drop.user(n);
    const double beta = pathloss(u.r, cell);
    const double scale = std::sqrt(beta * u.k_factor / (u.k_factor + 1.0));
    const auto steer = los_steering(u.theta, cell);
    auto col = g.col(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < m; ++i) col[i] = scale * steer[i];
  }
  return g;
}

// Fresh scattered component. Entries are drawn column by column, antenna
// index ascending, so a given stream always produces the same matrix.
inline CMat nlos_component(const UserDrop& drop, const CellConfig& cell, Rng& rng) {
  const std::size_t m = static_cast<std::size_t>(cell.m_antennas);
  CMat g(m, static_cast<std::size_t>(drop.size()));
  for (int n = 0; n < drop.size(); ++n) {
    const UserLocation& u = drop.user(n);
    const double beta = pathloss(u.r, cell);
    const double scale = std::sqrt(beta / (u.k_factor + 1.0));
    auto col = g.col(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < m; ++i) col[i] = scale * rng.cnormal();
  }
  return g;
}

inline ChannelRealization draw_channel(const UserDrop& drop, const CellConfig& cell, Rng& rng) {
  return {los_component(drop, cell), nlos_component(drop, cell, rng),
          large_scale_gains(drop, cell)};
}

}  // namespace lapa
