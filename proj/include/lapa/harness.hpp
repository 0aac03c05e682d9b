// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lapa/assignment.hpp"
#include "lapa/channel.hpp"
#include "lapa/geometry.hpp"
#include "lapa/interference.hpp"
#include "lapa/receiver.hpp"
#include "lapa/rng.hpp"

namespace lapa {

inline constexpr const char* scheme_location_aware = "location-aware";
inline constexpr const char* scheme_random = "random";

// Full description of a sweep run. Defaults are the desk-scale baseline
// scenario: 20 users, 10 pilots, 196-symbol coherence interval, 3.8 pathloss
// exponent, 1000 m cell with users no closer than 100 m, K = 3 (linear) for
// everyone, p_u = 10 over unit noise.
struct ExperimentConfig {
  int n_users = 20;
  int tau = 10;
  int coherence_t = 196;
  double pathloss_exponent = 3.8;
  double cell_radius_m = 1000.0;
  double r_min_m = 100.0;
  double k_factor = 3.0;  // linear
  double p_u = 10.0;      // linear, relative to unit noise variance
  double antenna_spacing_ratio = 0.5;
  std::vector<int> m_sweep = {20, 50, 100, 200};
  int trials_interference = 5000;
  int trials_rate = 1000;
  int fading_realizations = 50;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 -> hardware concurrency; never affects results
  Detector detector = Detector::normalized_mf;
  MatchPolicy matching = MatchPolicy::greedy;

  void validate() const {
    if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
    if (tau < 1 || tau > n_users)
      throw std::invalid_argument("tau must satisfy 1 <= tau <= n_users");
    if (coherence_t < tau)
      throw std::invalid_argument("coherence_t must be >= tau");
    if (!(pathloss_exponent > 0.0))
      throw std::invalid_argument("pathloss_exponent must be > 0");
    if (!(cell_radius_m > 0.0)) throw std::invalid_argument("cell_radius_m must be > 0");
    if (!(r_min_m > 0.0) || !(r_min_m < cell_radius_m))
      throw std::invalid_argument("r_min_m must satisfy 0 < r_min_m < cell_radius_m");
    if (!(k_factor >= 0.0)) throw std::invalid_argument("k_factor must be >= 0");
    if (!(p_u > 0.0)) throw std::invalid_argument("p_u must be > 0");
    if (!(antenna_spacing_ratio > 0.0))
      throw std::invalid_argument("antenna_spacing_ratio must be > 0");
    if (m_sweep.empty()) throw std::invalid_argument("m_sweep must not be empty");
    for (int m : m_sweep)
      if (m < 1) throw std::invalid_argument("m_sweep entries must be >= 1");
    if (trials_interference < 1) throw std::invalid_argument("trials_interference must be >= 1");
    if (trials_rate < 1) throw std::invalid_argument("trials_rate must be >= 1");
    if (fading_realizations < 1) throw std::invalid_argument("fading_realizations must be >= 1");
  }

  CellConfig cell(int m_antennas) const {
    return CellConfig(m_antennas, cell_radius_m, pathloss_exponent, antenna_spacing_ratio);
  }

  TrainingConfig training() const { return TrainingConfig(p_u, tau); }
};

// One averaged (M, scheme) point. Metrics not produced by the experiment
// kind stay unset.
struct ExperimentRecord {
  int m_antennas = 0;
  std::string scheme;
  std::optional<double> mean_i_tot;
  std::optional<double> mean_i_tot_db;
  std::optional<double> mean_sum_rate;
  int trials = 0;
  std::uint64_t seed = 0;
};

// Draws user positions uniformly: r ~ U[r_min, r_h], theta ~ U[0, 2*pi);
// the K-factor is the configured constant. Two uniforms per user, user index
// ascending.
inline UserDrop draw_drop(const ExperimentConfig& config, Rng& rng) {
  std::vector<UserLocation> users(static_cast<std::size_t>(config.n_users));
  for (auto& u : users) {
    u.r = rng.uniform(config.r_min_m, config.cell_radius_m);
    u.theta = rng.uniform(0.0, two_pi);
    u.k_factor = config.k_factor;
  }
  return UserDrop(std::move(users));
}

namespace detail {

inline int resolve_threads(int requested, int jobs) {
  int threads = requested;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return std::min(threads, std::max(jobs, 1));
}

// Runs fn(trial) for every trial in [0, trials) over `threads` workers with
// a static contiguous split. Each trial writes only its own output slot, so
// the result is identical for any worker count.
template <typename Fn>
void parallel_trials(int trials, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  const int chunk = (trials + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([begin, end, &fn] {
      for (int t = begin; t < end; ++t) fn(t);
    });
  }
  for (auto& worker : workers) worker.join();
}

inline double mean_in_order(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

}  // namespace detail

// Interference sweep: for every antenna count in m_sweep, the
// average I_tot over trials_interference drops, for the location-aware and
// the random scheme. Both schemes (and every M) see identical drops, so the
// comparison is paired.
inline std::vector<ExperimentRecord> run_interference_experiment(const ExperimentConfig& config) {
  config.validate();
  const int trials = config.trials_interference;
  const int n_points = static_cast<int>(config.m_sweep.size());
  const TrainingConfig training = config.training();

  std::vector<std::vector<double>> proposed(static_cast<std::size_t>(n_points),
                                            std::vector<double>(static_cast<std::size_t>(trials)));
  std::vector<std::vector<double>> random_scheme = proposed;

  const int threads = detail::resolve_threads(config.threads, trials);
  detail::parallel_trials(trials, threads, [&](int trial) {
    Rng drop_rng = Rng::from_key(config.master_seed, static_cast<std::uint64_t>(trial),
                                 StreamTag::drop);
    const UserDrop drop = draw_drop(config, drop_rng);
    Rng assign_rng = Rng::from_key(config.master_seed, static_cast<std::uint64_t>(trial),
                                   StreamTag::random_assign);
    const PilotAssignment random_assignment = assign_random(config.n_users, config.tau, assign_rng);

    for (int point = 0; point < n_points; ++point) {
      const CellConfig cell = config.cell(config.m_sweep[static_cast<std::size_t>(point)]);
      const PilotAssignment la =
          assign_location_aware(drop, config.tau, cell, training, config.matching);
      proposed[static_cast<std::size_t>(point)][static_cast<std::size_t>(trial)] =
          total_interference(drop, la, cell, training).total;
      random_scheme[static_cast<std::size_t>(point)][static_cast<std::size_t>(trial)] =
          total_interference(drop, random_assignment, cell, training).total;
    }
  });

  std::vector<ExperimentRecord> records;
  records.reserve(static_cast<std::size_t>(2 * n_points));
  for (int point = 0; point < n_points; ++point) {
    for (const char* scheme : {scheme_location_aware, scheme_random}) {
      const auto& samples =
          scheme == scheme_location_aware ? proposed[static_cast<std::size_t>(point)]
                                          : random_scheme[static_cast<std::size_t>(point)];
      ExperimentRecord record;
      record.m_antennas = config.m_sweep[static_cast<std::size_t>(point)];
      record.scheme = scheme;
      record.mean_i_tot = detail::mean_in_order(samples);
      if (*record.mean_i_tot > 0.0) record.mean_i_tot_db = to_db(*record.mean_i_tot);
      record.trials = trials;
      record.seed = config.master_seed;
      records.push_back(std::move(record));
    }
  }
  return records;
}

// Sum-rate sweep: per (M, scheme), the mean over trials_rate drops of the
// ergodic sum rate, each drop averaged over fading_realizations channel and
// training-noise realizations. Schemes share drops and fading substreams, so
// rate differences isolate the assignment effect.
inline std::vector<ExperimentRecord> run_rate_experiment(const ExperimentConfig& config) {
  config.validate();
  const int trials = config.trials_rate;
  const int n_points = static_cast<int>(config.m_sweep.size());
  const TrainingConfig training = config.training();

  std::vector<std::vector<double>> proposed(static_cast<std::size_t>(n_points),
                                            std::vector<double>(static_cast<std::size_t>(trials)));
  std::vector<std::vector<double>> random_scheme = proposed;

  const int threads = detail::resolve_threads(config.threads, trials);
  detail::parallel_trials(trials, threads, [&](int trial) {
    Rng drop_rng = Rng::from_key(config.master_seed, static_cast<std::uint64_t>(trial),
                                 StreamTag::drop);
    const UserDrop drop = draw_drop(config, drop_rng);
    Rng assign_rng = Rng::from_key(config.master_seed, static_cast<std::uint64_t>(trial),
                                   StreamTag::random_assign);
    const PilotAssignment random_assignment = assign_random(config.n_users, config.tau, assign_rng);
    const std::uint64_t fading_seed =
        derive_key(config.master_seed, static_cast<std::uint64_t>(trial), StreamTag::rate_trial);

    for (int point = 0; point < n_points; ++point) {
      const CellConfig cell = config.cell(config.m_sweep[static_cast<std::size_t>(point)]);
      const PilotAssignment la =
          assign_location_aware(drop, config.tau, cell, training, config.matching);
      proposed[static_cast<std::size_t>(point)][static_cast<std::size_t>(trial)] =
          ergodic_rates(drop, la, cell, training, config.coherence_t,
                        config.fading_realizations, fading_seed, config.detector)
              .sum_rate;
      random_scheme[static_cast<std::size_t>(point)][static_cast<std::size_t>(trial)] =
          ergodic_rates(drop, random_assignment, cell, training, config.coherence_t,
                        config.fading_realizations, fading_seed, config.detector)
              .sum_rate;
    }
  });

  std::vector<ExperimentRecord> records;
  records.reserve(static_cast<std::size_t>(2 * n_points));
  for (int point = 0; point < n_points; ++point) {
    for (const char* scheme : {scheme_location_aware, scheme_random}) {
      const auto& samples =
          scheme == scheme_location_aware ? proposed[static_cast<std::size_t>(point)]
                                          : random_scheme[static_cast<std::size_t>(point)];
      ExperimentRecord record;
      record.m_antennas = config.m_sweep[static_cast<std::size_t>(point)];
      record.scheme = scheme;
      record.mean_sum_rate = detail::mean_in_order(samples);
      record.trials = trials;
      record.seed = config.master_seed;
      records.push_back(std::move(record));
    }
  }
  return records;
}

}  // namespace lapa
