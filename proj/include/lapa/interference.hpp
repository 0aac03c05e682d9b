// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lapa/channel.hpp"
#include "lapa/geometry.hpp"
#include "lapa/pilots.hpp"
#include "lapa/training.hpp"

namespace lapa {

// sin(M*x/2) / sin(x/2), the magnitude kernel of a sum of M unit phasors.
// The singularity at x = 0 (mod 2*pi) is removable; near it the ratio is
// evaluated by series so the limit returns exactly M (with the sign
// (-1)^(k(M-1)) at odd wraps).
inline double dirichlet_ratio(double d_theta, int m_antennas) {
  const double x = 0.5 * d_theta;
  const double sx = std::sin(x);
  if (std::abs(sx) >= 1e-8) return std::sin(static_cast<double>(m_antennas) * x) / sx;

  const long long k = std::llround(x / std::numbers::pi);
  const double delta = x - static_cast<double>(k) * std::numbers::pi;
  const double sign = (std::llabs(k) * (m_antennas - 1)) % 2 == 0 ? 1.0 : -1.0;
  if (delta == 0.0) return sign * static_cast<double>(m_antennas);
  // sin(M*delta) / sin(delta) with sin(delta) expanded around zero.
  return sign * std::sin(static_cast<double>(m_antennas) * delta) /
         (delta * (1.0 - delta * delta / 6.0));
}

// Amplitude coupling of two Rician LOS components:
// sqrt(beta_n beta_i K_n K_i / ((K_n+1)(K_i+1))).
inline double los_coupling(const UserLocation& user_n, double beta_n, const UserLocation& user_i,
                           double beta_i) {
  return std::sqrt(beta_n * beta_i * user_n.k_factor * user_i.k_factor /
                   ((user_n.k_factor + 1.0) * (user_i.k_factor + 1.0)));
}

// Closed form of (g_n_los)^H g_i_los for a uniform linear array:
// coupling * kernel * phase, equal to the brute-force inner product of the
// scaled steering vectors.
inline std::complex<double> los_cross_product(const UserLocation& user_n, double beta_n,
                                              const UserLocation& user_i, double beta_i,
                                              const CellConfig& cell) {
  const double omega = los_coupling(user_n, beta_n, user_i, beta_i);
  const double d_theta = aoa_phase_delta(user_n.theta, user_i.theta, cell.antenna_spacing_ratio);
  const double kernel = dirichlet_ratio(d_theta, cell.m_antennas);
  const double phase = d_theta * static_cast<double>(cell.m_antennas - 1) / 2.0;
  return omega * kernel * std::polar(1.0, phase);
}

// Large-M limit of (1/M) * ghat_n^H ghat_n for user n sharing a pilot with
// `group`: beta_n + sum_{j in group, j != n} beta_j / (1 + K_j) + 1/p_p.
inline double asymptotic_denominator(int user_n, std::span<const int> group,
                                     std::span<const double> betas,
                                     std::span<const double> k_factors,
                                     const TrainingConfig& cfg) {
  bool found = false;
  double contamination = 0.0;
  for (int j : group) {
    if (j == user_n) {
      found = true;
      continue;
    }
    contamination +=
        betas[static_cast<std::size_t>(j)] / (1.0 + k_factors[static_cast<std::size_t>(j)]);
  }
  if (!found) throw std::invalid_argument("asymptotic_denominator: user not in its group");
  return betas[static_cast<std::size_t>(user_n)] + contamination + 1.0 / cfg.p_p();
}

// Location-only pairwise measure |I_ni|^2: how strongly the LOS component of
// user i leaks into the detector of user n, assuming they share a pilot with
// the rest of `group_of_n`.
struct PairwiseInterference {
  double omega = 0.0;    // LOS amplitude coupling
  double d_theta = 0.0;  // phase increment between the two arrival angles
  double value = 0.0;    // |I_ni|^2
};

namespace detail {

inline PairwiseInterference pairwise_interference_from_gains(
    const UserDrop& drop, const CellConfig& cell, const TrainingConfig& cfg, int user_n,
    int user_i, std::span<const int> group_of_n, std::span<const double> betas,
    std::span<const double> k_factors) {
  const UserLocation& a = drop.user(user_n);
  const UserLocation& b = drop.user(user_i);
  PairwiseInterference out;
  out.omega = los_coupling(a, betas[static_cast<std::size_t>(user_n)], b,
                           betas[static_cast<std::size_t>(user_i)]);
  out.d_theta = aoa_phase_delta(a.theta, b.theta, cell.antenna_spacing_ratio);
  const double kernel = dirichlet_ratio(out.d_theta, cell.m_antennas);
  const double denom = asymptotic_denominator(user_n, group_of_n, betas, k_factors, cfg) *
                       static_cast<double>(cell.m_antennas);
  out.value = (out.omega * out.omega) * (kernel * kernel) / (denom * denom);
  return out;
}

inline std::vector<double> k_factors_of(const UserDrop& drop) {
  std::vector<double> k(static_cast<std::size_t>(drop.size()));
  for (int n = 0; n < drop.size(); ++n) k[static_cast<std::size_t>(n)] = drop.user(n).k_factor;
  return k;
}

}  // namespace detail

inline PairwiseInterference pairwise_interference(const UserDrop& drop, const CellConfig& cell,
                                                  const TrainingConfig& cfg, int user_n,
                                                  int user_i, std::span<const int> group_of_n) {
  const auto betas = large_scale_gains(drop, cell);
  const auto ks = detail::k_factors_of(drop);
  return detail::pairwise_interference_from_gains(drop, cell, cfg, user_n, user_i, group_of_n,
                                                  betas, ks);
}

// Network-wide LOS interference. `pairs` holds every ordered same-pilot pair
// (n, i), n != i; `total` is their sum. The ordered-pair convention makes the
// metric comparable across assignment schemes and is used consistently by
// the assignment experiments.
struct InterferenceReport {
  struct Pair {
    int n = 0;
    int i = 0;
    double value = 0.0;
  };

  std::vector<Pair> pairs;
  double total = 0.0;
  std::optional<double> total_db;  // set only when total > 0
};

inline InterferenceReport total_interference(const UserDrop& drop,
                                             const PilotAssignment& assignment,
                                             const CellConfig& cell, const TrainingConfig& cfg) {
  if (assignment.n_users() != drop.size())
    throw std::invalid_argument("assignment/drop user-count mismatch");
  if (assignment.tau() != cfg.tau())
    throw std::invalid_argument("assignment/config tau mismatch");

  const auto betas = large_scale_gains(drop, cell);
  const auto ks = detail::k_factors_of(drop);

  InterferenceReport report;
  for (const auto& group : assignment.groups()) {
    for (int n : group) {
      for (int i : group) {
        if (n == i) continue;
        const auto p = detail::pairwise_interference_from_gains(drop, cell, cfg, n, i, group,
                                                                betas, ks);
        report.pairs.push_back({n, i, p.value});
        report.total += p.value;
      }
    }
  }
  if (report.total > 0.0) report.total_db = to_db(report.total);
  return report;
}

// |I_ni|^2 over a symmetric grid of d_theta values; the grid always contains
// zero exactly. All other parameters (beta, K, p_p) are fixed to one, so the
// peak value at d_theta = 0 depends only on M.
inline std::vector<std::pair<double, double>> kernel_sweep(int m_antennas, int points,
                                                           double max_abs_d_theta) {
  if (m_antennas < 1) throw std::invalid_argument("kernel_sweep: m_antennas must be >= 1");
  if (points < 3 || points % 2 == 0)
    throw std::invalid_argument("kernel_sweep: points must be odd and >= 3");
  if (!(max_abs_d_theta > 0.0)) throw std::invalid_argument("kernel_sweep: range must be > 0");

  const double denom_scalar = 1.0 + 0.5 + 1.0;  // beta_n + beta_i/(1+K_i) + 1/p_p, all ones
  const double omega = 0.5;                     // unit betas and K-factors
  const double m = static_cast<double>(m_antennas);

  std::vector<std::pair<double, double>> sweep;
  sweep.reserve(static_cast<std::size_t>(points));
  const int half = (points - 1) / 2;
  const double step = max_abs_d_theta / static_cast<double>(half);
  for (int idx = -half; idx <= half; ++idx) {
    const double d_theta = static_cast<double>(idx) * step;
    const double kernel = dirichlet_ratio(d_theta, m_antennas);
    const double value =
        omega * omega * kernel * kernel / (m * m * denom_scalar * denom_scalar);
    sweep.emplace_back(d_theta, value);
  }
  return sweep;
}

}  // namespace lapa
