// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lapa {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// One single-antenna user: distance from the base station, angle of arrival
// at the array, and linear (non-dB) Rician K-factor.
struct UserLocation {
  double r = 0.0;         // meters, > 0
  double theta = 0.0;     // radians, in [0, 2*pi)
  double k_factor = 0.0;  // linear, >= 0
};

// Ordered list of users. Indices are stable identifiers: internal index n is
// 0-based, user-facing labels (files, reports) are 1-based.
class UserDrop {
 public:
  explicit UserDrop(std::vector<UserLocation> users) : users_(std::move(users)) {
    if (users_.empty()) throw std::invalid_argument("drop must contain at least one user");
    for (std::size_t n = 0; n < users_.size(); ++n) {
      const auto& u = users_[n];
      const std::string label = "users[" + std::to_string(n + 1) + "]";
      if (!(u.r > 0.0) || !std::isfinite(u.r))
        throw std::invalid_argument(label + ".r: must be a positive finite distance");
      if (!(u.theta >= 0.0) || !(u.theta < two_pi))
        throw std::invalid_argument(label + ".theta: must lie in [0, 2*pi)");
      if (!(u.k_factor >= 0.0) || !std::isfinite(u.k_factor))
        throw std::invalid_argument(label + ".k_factor: must be a nonnegative finite value");
    }
  }

  const std::vector<UserLocation>& users() const noexcept { return users_; }
  const UserLocation& user(int n) const { return users_.at(static_cast<std::size_t>(n)); }
  int size() const noexcept { return static_cast<int>(users_.size()); }

 private:
  std::vector<UserLocation> users_;
};

// Base-station and propagation parameters. antenna_spacing_ratio is d/lambda;
// half-wavelength spacing is the default.
struct CellConfig {
  CellConfig(int m_antennas_, double cell_radius_m_, double pathloss_exponent_,
             double antenna_spacing_ratio_ = 0.5)
      : m_antennas(m_antennas_),
        cell_radius_m(cell_radius_m_),
        pathloss_exponent(pathloss_exponent_),
        antenna_spacing_ratio(antenna_spacing_ratio_) {
    if (m_antennas < 1) throw std::invalid_argument("m_antennas must be >= 1");
    if (!(cell_radius_m > 0.0)) throw std::invalid_argument("cell_radius_m must be > 0");
    if (!(pathloss_exponent >= 0.0))
      throw std::invalid_argument("pathloss_exponent must be >= 0");
    if (!(antenna_spacing_ratio > 0.0))
      throw std::invalid_argument("antenna_spacing_ratio must be > 0");
  }

  int m_antennas;
  double cell_radius_m;
  double pathloss_exponent;
  double antenna_spacing_ratio;
};

// Large-scale gain beta = (r / r_h)^(-v). Unit reference power at the cell
// edge r = r_h; strictly decreasing in r for v > 0.
inline double pathloss(double r_m, const CellConfig& cell) {
  if (!(r_m > 0.0) || !std::isfinite(r_m))
    throw std::domain_error("pathloss: distance must be positive and finite");
  return std::pow(r_m / cell.cell_radius_m, -cell.pathloss_exponent);
}

// Uniform-linear-array response: element m (0-based) is
// exp(-j * m * 2*pi * (d/lambda) * sin(theta)). Unit modulus per element,
// squared norm exactly M.
inline std::vector<std::complex<double>> los_steering(double theta, const CellConfig& cell) {
  if (!std::isfinite(theta)) throw std::domain_error("los_steering: theta must be finite");
  const double step = -two_pi * cell.antenna_spacing_ratio * std::sin(theta);
  std::vector<std::complex<double>> a(static_cast<std::size_t>(cell.m_antennas));
  for (int m = 0; m < cell.m_antennas; ++m)
    a[static_cast<std::size_t>(m)] = std::polar(1.0, static_cast<double>(m) * step);
  return a;
}

// Phase increment between two arrival angles: 2*pi*(d/lambda)*(sin a - sin b).
inline double aoa_phase_delta(double theta_n, double theta_i, double spacing_ratio) noexcept {
  return two_pi * spacing_ratio * (std::sin(theta_n) - std::sin(theta_i));
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace lapa
