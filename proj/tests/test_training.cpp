// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>

#include "doctest.h"
#include "lapa/channel.hpp"
#include "lapa/training.hpp"

using namespace lapa;

namespace {

ChannelRealization sample_channel(int m, const UserDrop& drop, std::uint64_t seed) {
  const CellConfig cell(m, 1000.0, 3.8);
  Rng rng(seed);
  return draw_channel(drop, cell, rng);
}

double max_col_error(std::span<const std::complex<double>> got,
                     std::span<const std::complex<double>> want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  return worst;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("pilot power is tied to the pilot count") {
  const TrainingConfig cfg(2.0, 5);
  CHECK(cfg.p_p() == 10.0);
  CHECK_THROWS_AS(TrainingConfig(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(TrainingConfig(-1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(TrainingConfig(1.0, 0), std::invalid_argument);
}

TEST_CASE("noise-free orthogonal pilots recover the channel via correlation") {
  const UserDrop drop({{200.0, 0.4, 2.0}, {600.0, 2.0, 1.0}, {900.0, 5.0, 0.5}});
  const auto chan = sample_channel(6, drop, 11);
  const PilotAssignment assignment(3, {{0}, {1}, {2}});
  const auto pilots = build_pilot_matrix(assignment, 3);
  const TrainingConfig cfg(2.5, 3);

  const CMat y = received_training_noise_free(chan, pilots, cfg);
  const CMat g = chan.combined();
  const double sqrt_pp = std::sqrt(cfg.p_p());
  // Y * Phi / sqrt(p_p): column of each user's pilot, rescaled.
  for (int n = 0; n < 3; ++n) {
    const auto y_col = y.col(static_cast<std::size_t>(pilots.pilot_of(n)));
    const auto g_col = g.col(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < y_col.size(); ++i)
      CHECK(std::abs(y_col[i] / sqrt_pp - g_col[i]) < 1e-12);
  }
}

TEST_CASE("zero channel leaves only unit-variance noise in the received block") {
  const int m = 64;
  const int n_users = 2;
  ChannelRealization chan{CMat(m, n_users), CMat(m, n_users), {1.0, 1.0}};
  const PilotAssignment assignment(2, {{0}, {1}});
  const auto pilots = build_pilot_matrix(assignment, n_users);
  const TrainingConfig cfg(1.0, 2);

  CHECK(frobenius_sq(received_training_noise_free(chan, pilots, cfg)) == 0.0);

  Rng rng(21);
  double power = 0.0;
  const int draws = 100;
  for (int d = 0; d < draws; ++d) power += frobenius_sq(received_training(chan, pilots, cfg, rng));
  const double entries = static_cast<double>(draws * m * 2);
  // |CN(0,1)|^2 has mean 1 and variance 1.
  const double se = std::sqrt(1.0 / entries);
  CHECK(std::abs(power / entries - 1.0) < 3.0 * se);
}

TEST_CASE("received power splits into signal and noise energy") {
  const UserDrop drop(
      {{300.0, 1.0, 3.0}, {500.0, 2.2, 3.0}, {700.0, 3.1, 3.0}, {900.0, 4.4, 3.0}});
  const auto chan = sample_channel(6, drop, 31);
  const PilotAssignment assignment(2, {{0, 2}, {1, 3}});
  const auto pilots = build_pilot_matrix(assignment, 4);
  const TrainingConfig cfg(1.5, 2);

  const double signal_energy = frobenius_sq(received_training_noise_free(chan, pilots, cfg));
  const double expected = signal_energy + 6.0 * 2.0;  // + M * tau noise energy

  Rng rng(77);
  const int draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double f = frobenius_sq(received_training(chan, pilots, cfg, rng));
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  const double se = std::sqrt(variance / draws);
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("orthogonal pilots and no noise give an exact estimate") {
  const UserDrop drop({{150.0, 0.9, 4.0}, {450.0, 3.3, 2.0}, {850.0, 5.9, 1.0}});
  const auto chan = sample_channel(8, drop, 13);
  const PilotAssignment assignment(3, {{0}, {1}, {2}});
  const auto pilots = build_pilot_matrix(assignment, 3);
  const TrainingConfig cfg(10.0, 3);

  const CMat y = received_training_noise_free(chan, pilots, cfg);
  const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);
  const CMat g = chan.combined();
  for (std::size_t n = 0; n < 3; ++n) {
    const double scale = std::sqrt(norm_sq(g.col(n)));
    CHECK(max_col_error(estimate.g_hat.col(n), g.col(n)) < 1e-12 * (1.0 + scale));
  }
}

TEST_CASE("shared pilots contaminate the estimate with the partner NLOS column") {
  const UserDrop drop({{200.0, 0.2, 2.0}, {800.0, 2.8, 3.0}});
  const auto chan = sample_channel(8, drop, 17);
  const PilotAssignment assignment(1, {{0, 1}});
  const auto pilots = build_pilot_matrix(assignment, 2);
  const TrainingConfig cfg(4.0, 1);

  const CMat y = received_training_noise_free(chan, pilots, cfg);
  const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);

  for (int n = 0; n < 2; ++n) {
    const int other = 1 - n;
    std::vector<std::complex<double>> expected(8);
    for (std::size_t i = 0; i < 8; ++i)
      expected[i] = chan.g_los(i, static_cast<std::size_t>(n)) +
                    chan.g_nlos(i, static_cast<std::size_t>(n)) +
                    chan.g_nlos(i, static_cast<std::size_t>(other));
    CHECK(max_col_error(estimate.g_hat.col(static_cast<std::size_t>(n)), expected) < 1e-10);
  }
}

TEST_CASE("huge pilot power reduces the error to pure contamination") {
  const UserDrop drop({{200.0, 0.2, 2.0}, {800.0, 2.8, 3.0}});
  const auto chan = sample_channel(8, drop, 19);
  const PilotAssignment assignment(1, {{0, 1}});
  const auto pilots = build_pilot_matrix(assignment, 2);
  const TrainingConfig cfg(1e12, 1);

  Rng rng(23);
  const CMat y = received_training(chan, pilots, cfg, rng);
  const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);
  for (int n = 0; n < 2; ++n) {
    const int other = 1 - n;
    std::vector<std::complex<double>> expected(8);
    for (std::size_t i = 0; i < 8; ++i)
      expected[i] = chan.g_los(i, static_cast<std::size_t>(n)) +
                    chan.g_nlos(i, static_cast<std::size_t>(n)) +
                    chan.g_nlos(i, static_cast<std::size_t>(other));
    CHECK(max_col_error(estimate.g_hat.col(static_cast<std::size_t>(n)), expected) < 1e-3);
  }
}

TEST_CASE("noise-free estimation is the linear map G_los + G_nlos * R_Phi") {
  const UserDrop drop({{150.0, 0.4, 1.0},
                       {350.0, 1.1, 2.0},
                       {550.0, 2.7, 3.0},
                       {750.0, 3.9, 0.5},
                       {950.0, 5.5, 4.0}});
  const auto chan = sample_channel(8, drop, 29);
  const PilotAssignment assignment(2, {{0, 2, 4}, {1, 3}});
  const auto pilots = build_pilot_matrix(assignment, 5);
  const TrainingConfig cfg(3.0, 2);

  const CMat y = received_training_noise_free(chan, pilots, cfg);
  const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);

  const RMat r_phi = pilots.correlation();
  for (std::size_t n = 0; n < 5; ++n) {
    std::vector<std::complex<double>> expected(8);
    for (std::size_t i = 0; i < 8; ++i) {
      std::complex<double> acc = chan.g_los(i, n);
      for (std::size_t j = 0; j < 5; ++j)
        if (r_phi(j, n) != 0.0) acc += chan.g_nlos(i, j);
      expected[i] = acc;
    }
    CHECK(max_col_error(estimate.g_hat.col(n), expected) < 1e-10);
  }

  // Same-group members share one estimated NLOS column.
  for (int n : {0, 2, 4}) {
    std::vector<std::complex<double>> own(8), first(8);
    for (std::size_t i = 0; i < 8; ++i) {
      own[i] = estimate.g_hat(i, static_cast<std::size_t>(n)) -
               chan.g_los(i, static_cast<std::size_t>(n));
      first[i] = estimate.g_hat(i, 0) - chan.g_los(i, 0);
    }
    CHECK(max_col_error(own, first) < 1e-12);
  }
}

TEST_CASE("with a zero channel each estimated entry has variance 1/p_p") {
  const int m = 4;
  ChannelRealization chan{CMat(m, 3), CMat(m, 3), {1.0, 1.0, 1.0}};
  const PilotAssignment assignment(2, {{0, 1}, {2}});
  const auto pilots = build_pilot_matrix(assignment, 3);
  const TrainingConfig cfg(2.0, 2);  // p_p = 4

  Rng rng(37);
  const int draws = 10000;
  double power = 0.0;
  for (int d = 0; d < draws; ++d) {
    const CMat y = received_training(chan, pilots, cfg, rng);
    const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);
    power += frobenius_sq(estimate.g_hat);
  }
  const double per_entry = power / (static_cast<double>(draws) * m * 3);
  CHECK(per_entry == doctest::Approx(1.0 / cfg.p_p()).epsilon(0.05));
}

}  // TEST_SUITE
