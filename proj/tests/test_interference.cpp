// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>

#include "doctest.h"
#include "lapa/interference.hpp"
#include "lapa/rng.hpp"

using namespace lapa;

namespace {

// Independent route: inner product of the explicitly built, scaled steering
// vectors.
std::complex<double> brute_force_cross(const UserLocation& a, double beta_a,
                                       const UserLocation& b, double beta_b,
                                       const CellConfig& cell) {
  const auto steer_a = los_steering(a.theta, cell);
  const auto steer_b = los_steering(b.theta, cell);
  const double ca = std::sqrt(beta_a * a.k_factor / (a.k_factor + 1.0));
  const double cb = std::sqrt(beta_b * b.k_factor / (b.k_factor + 1.0));
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < steer_a.size(); ++i)
    acc += std::conj(ca * steer_a[i]) * (cb * steer_b[i]);
  return acc;
}

}  // namespace

TEST_SUITE("interference") {

TEST_CASE("dirichlet ratio returns exactly M at the removable singularity") {
  CHECK(dirichlet_ratio(0.0, 20) == 20.0);
  CHECK(dirichlet_ratio(0.0, 1) == 1.0);
  CHECK(dirichlet_ratio(2.0 * std::numbers::pi, 7) == 7.0);  // full wrap
}

TEST_CASE("dirichlet ratio vanishes at the kernel nulls") {
  for (int m : {4, 20, 64}) {
    const double null = two_pi / static_cast<double>(m);
    CHECK(std::abs(dirichlet_ratio(null, m)) < 1e-12);
  }
}

TEST_CASE("dirichlet ratio for M = 3 at d_theta = pi/2 equals one") {
  const double d_theta = std::numbers::pi / 2.0;
  CHECK(dirichlet_ratio(d_theta, 3) == doctest::Approx(1.0).epsilon(1e-13));

  // Cross-check against the explicit three-term phasor sum.
  std::complex<double> sum{0.0, 0.0};
  for (int m = 0; m < 3; ++m) sum += std::polar(1.0, m * d_theta);
  const auto phased = dirichlet_ratio(d_theta, 3) * std::polar(1.0, d_theta * (3 - 1) / 2.0);
  CHECK(std::abs(sum - phased) < 1e-12);
}

TEST_CASE("dirichlet ratio magnitude is even in d_theta") {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const double d_theta = rng.uniform(-two_pi, two_pi);
    const int m = 1 + static_cast<int>(rng.below(64));
    CHECK(std::abs(dirichlet_ratio(-d_theta, m)) ==
          doctest::Approx(std::abs(dirichlet_ratio(d_theta, m))).epsilon(1e-12));
  }
}

TEST_CASE("self cross product is the squared LOS column norm") {
  const CellConfig cell(24, 1000.0, 3.8);
  const UserLocation u{400.0, 1.2, 2.5};
  const double beta = pathloss(u.r, cell);
  const auto self = los_cross_product(u, beta, u, beta, cell);
  CHECK(self.real() == doctest::Approx(24.0 * beta * 2.5 / 3.5).epsilon(1e-12));
  CHECK(std::abs(self.imag()) < 1e-9);
}

TEST_CASE("zero K-factor kills the LOS cross product") {
  const CellConfig cell(24, 1000.0, 3.8);
  const UserLocation a{400.0, 1.2, 2.5};
  const UserLocation b{700.0, 0.4, 0.0};
  CHECK(los_cross_product(a, pathloss(a.r, cell), b, pathloss(b.r, cell), cell) ==
        std::complex<double>(0.0, 0.0));
}

TEST_CASE("closed-form cross product matches the brute-force inner product") {
  const CellConfig cell(64, 1000.0, 3.8);
  Rng rng(55);
  for (int k = 0; k < 200; ++k) {
    const UserLocation a{rng.uniform(100.0, 1000.0), rng.uniform(0.0, two_pi),
                         rng.uniform(0.0, 10.0)};
    const UserLocation b{rng.uniform(100.0, 1000.0), rng.uniform(0.0, two_pi),
                         rng.uniform(0.0, 10.0)};
    const double beta_a = pathloss(a.r, cell);
    const double beta_b = pathloss(b.r, cell);
    const auto closed = los_cross_product(a, beta_a, b, beta_b, cell);
    const auto brute = brute_force_cross(a, beta_a, b, beta_b, cell);
    const double scale = std::max(1.0, std::abs(brute));
    CHECK(std::abs(closed - brute) / scale < 1e-10);
  }
}

TEST_CASE("asymptotic denominator covers the singleton and symmetric cases") {
  const std::vector<double> betas{1.0, 1.0};
  const std::vector<double> ks{1.0, 1.0};
  const TrainingConfig unit_pp(1.0, 1);

  const std::vector<int> singleton{0};
  CHECK(asymptotic_denominator(0, singleton, betas, ks, unit_pp) == 2.0);

  const std::vector<int> pair{0, 1};
  CHECK(asymptotic_denominator(0, pair, betas, ks, unit_pp) == 2.5);

  CHECK_THROWS_AS(asymptotic_denominator(1, singleton, betas, ks, unit_pp),
                  std::invalid_argument);
}

TEST_CASE("asymptotic denominator matches the empirical estimate norm at large M") {
  // Desk-scale version of the large-M convergence check (the acceptance
  // suite runs the full-size variant).
  const int m = 1024;
  const CellConfig cell(m, 1000.0, 3.8);
  const UserDrop drop({{300.0, 0.7, 3.0}, {600.0, 2.9, 3.0}, {900.0, 4.8, 3.0}});
  const PilotAssignment assignment(1, {{0, 1, 2}});
  const auto pilots = build_pilot_matrix(assignment, 3);
  const TrainingConfig cfg(10.0, 1);
  const auto betas = large_scale_gains(drop, cell);
  const std::vector<double> ks{3.0, 3.0, 3.0};

  const double closed = asymptotic_denominator(0, assignment.groups()[0], betas, ks, cfg);

  Rng rng(2718);
  double mean = 0.0;
  const int draws = 100;
  for (int d = 0; d < draws; ++d) {
    const auto chan = draw_channel(drop, cell, rng);
    const CMat y = received_training(chan, pilots, cfg, rng);
    const auto estimate = ls_estimate(y, chan.g_los, pilots, cfg);
    mean += norm_sq(estimate.g_hat.col(0)) / static_cast<double>(m);
  }
  mean /= draws;
  CHECK(mean == doctest::Approx(closed).epsilon(0.05));
}

TEST_CASE("unit-parameter pair at coinciding angles scores 0.04 for M = 20") {
  const CellConfig cell(20, 1000.0, 3.8);
  const UserDrop drop({{1000.0, 0.3, 1.0}, {1000.0, 0.3, 1.0}});  // beta = 1, K = 1
  const TrainingConfig cfg(1.0, 1);                               // p_p = 1
  const std::vector<int> group{0, 1};
  const auto p = pairwise_interference(drop, cell, cfg, 0, 1, group);
  CHECK(p.d_theta == 0.0);
  CHECK(p.omega == 0.5);
  CHECK(p.value == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("pairwise measure dies at a kernel null and for huge arrays") {
  const double theta_n = std::asin(0.6);
  const double theta_i = std::asin(0.5);  // d_theta = pi/10
  const UserDrop drop({{1000.0, theta_n, 1.0}, {1000.0, theta_i, 1.0}});
  const TrainingConfig cfg(1.0, 1);
  const std::vector<int> group{0, 1};

  const CellConfig at_null(20, 1000.0, 3.8);
  CHECK(pairwise_interference(drop, at_null, cfg, 0, 1, group).value < 1e-25);

  const CellConfig huge(1000000, 1000.0, 3.8);
  CHECK(pairwise_interference(drop, huge, cfg, 0, 1, group).value < 1e-8);
}

TEST_CASE("pairwise measure is symmetric for symmetric parameter sets") {
  const UserDrop drop({{1000.0, 0.9, 2.0}, {1000.0, 2.2, 2.0}});
  const CellConfig cell(32, 1000.0, 3.8);
  const TrainingConfig cfg(2.0, 1);
  const std::vector<int> group{0, 1};
  const auto forward = pairwise_interference(drop, cell, cfg, 0, 1, group);
  const auto backward = pairwise_interference(drop, cell, cfg, 1, 0, group);
  CHECK(forward.value == backward.value);
}

TEST_CASE("pairwise measure decays like 1/M^2 away from kernel peaks") {
  const double theta_n = std::asin(0.8);
  const double theta_i = std::asin(0.8 - 2.0 / std::numbers::pi);  // d_theta = 2 rad
  const UserDrop drop({{800.0, theta_n, 3.0}, {400.0, theta_i, 3.0}});
  const TrainingConfig cfg(1.0, 1);
  const std::vector<int> group{0, 1};

  const double small_m = pairwise_interference(drop, CellConfig(16, 1000.0, 3.8), cfg, 0, 1,
                                               group)
                             .value;
  const double large_m = pairwise_interference(drop, CellConfig(160000, 1000.0, 3.8), cfg, 0, 1,
                                               group)
                             .value;
  CHECK(large_m < small_m * 1e-4);
}

TEST_CASE("total interference is zero without shared pilots or without LOS") {
  const UserDrop drop({{200.0, 0.4, 3.0}, {600.0, 1.9, 3.0}, {900.0, 3.7, 3.0}});
  const CellConfig cell(20, 1000.0, 3.8);

  const PilotAssignment singletons(3, {{0}, {1}, {2}});
  const auto orthogonal = total_interference(drop, singletons, cell, TrainingConfig(1.0, 3));
  CHECK(orthogonal.total == 0.0);
  CHECK(!orthogonal.total_db.has_value());
  CHECK(orthogonal.pairs.empty());

  const UserDrop rayleigh({{200.0, 0.4, 0.0}, {600.0, 1.9, 0.0}});
  const PilotAssignment shared(1, {{0, 1}});
  const auto no_los = total_interference(rayleigh, shared, cell, TrainingConfig(1.0, 1));
  CHECK(no_los.total == 0.0);
  CHECK(no_los.pairs.size() == 2);  // ordered pairs exist, they just score zero
}

TEST_CASE("two-user symmetric network totals 0.08 under the ordered-pair convention") {
  const UserDrop drop({{1000.0, 0.3, 1.0}, {1000.0, 0.3, 1.0}});
  const CellConfig cell(20, 1000.0, 3.8);
  const auto report = total_interference(drop, PilotAssignment(1, {{0, 1}}), cell,
                                         TrainingConfig(1.0, 1));
  REQUIRE(report.pairs.size() == 2);
  CHECK(report.total == doctest::Approx(0.08).epsilon(1e-15));
  REQUIRE(report.total_db.has_value());
  CHECK(*report.total_db == doctest::Approx(to_db(0.08)).epsilon(1e-12));
}

TEST_CASE("closed-form identity: cross product, denominator and pairwise agree") {
  Rng rng(808);
  const TrainingConfig cfg(5.0, 2);
  for (int k = 0; k < 300; ++k) {
    const int m = 1 + static_cast<int>(rng.below(256));
    const CellConfig cell(m, 1000.0, 3.8);
    const UserDrop drop({{rng.uniform(100.0, 1000.0), rng.uniform(0.0, two_pi),
                          rng.uniform(0.0, 10.0)},
                         {rng.uniform(100.0, 1000.0), rng.uniform(0.0, two_pi),
                          rng.uniform(0.0, 10.0)}});
    const std::vector<int> group{0, 1};
    const auto betas = large_scale_gains(drop, cell);
    const std::vector<double> ks{drop.user(0).k_factor, drop.user(1).k_factor};

    const auto cross =
        los_cross_product(drop.user(0), betas[0], drop.user(1), betas[1], cell);
    const double denom =
        static_cast<double>(m) * asymptotic_denominator(0, group, betas, ks, cfg);
    const double via_cross = std::norm(cross) / (denom * denom);
    const double direct = pairwise_interference(drop, cell, cfg, 0, 1, group).value;
    CHECK(std::abs(via_cross - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("kernel sweep has the exact 0.04 peak at zero offset") {
  const auto sweep = kernel_sweep(20, 4001, two_pi);
  REQUIRE(sweep.size() == 4001);
  const auto& center = sweep[2000];
  CHECK(center.first == 0.0);
  CHECK(center.second == doctest::Approx(0.04).epsilon(1e-15));
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].second >= 0.0);
    CHECK(sweep[i].second <= center.second + 1e-15);  // global maximum at zero
    CHECK(sweep[i].second == sweep[sweep.size() - 1 - i].second);
  }
  CHECK_THROWS_AS(kernel_sweep(20, 4000, two_pi), std::invalid_argument);
  CHECK_THROWS_AS(kernel_sweep(0, 11, two_pi), std::invalid_argument);
}

TEST_CASE("decibel conversion round-trips") {
  for (double v : {1e-6, 0.04, 1.0, 123.456}) {
    CHECK(from_db(to_db(v)) == doctest::Approx(v).epsilon(1e-12));
  }
}

}  // TEST_SUITE
