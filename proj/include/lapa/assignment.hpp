// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lapa/geometry.hpp"
#include "lapa/interference.hpp"
#include "lapa/matrix.hpp"
#include "lapa/pilots.hpp"
#include "lapa/rng.hpp"

namespace lapa {

// Users batched by ascending distance from the base station, tau per tier;
// the last tier may be short when tau does not divide N. Distance ties break
// by user index.
struct TierPartition {
  std::vector<std::vector<int>> tiers;
};

inline TierPartition partition_tiers(const UserDrop& drop, int tau) {
  if (tau < 1) throw std::invalid_argument("partition_tiers: tau must be >= 1");
  std::vector<int> order(static_cast<std::size_t>(drop.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&drop](int a, int b) { return drop.user(a).r < drop.user(b).r; });

  TierPartition partition;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tau)) {
    const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tau));
    partition.tiers.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return partition;
}

// Sequential greedy matching in row order: row m takes the cheapest column
// still available (ties -> lowest column index). Requires at least as many
// rows as columns; every column ends up with exactly one row.
inline std::vector<int> unique_min_matching(const RMat& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  if (cols > rows)
    throw std::invalid_argument("unique_min_matching: more columns than reference rows");

  std::vector<int> row_of_col(cols, -1);
  std::vector<bool> taken(cols, false);
  std::size_t assigned = 0;
  for (std::size_t m = 0; m < rows && assigned < cols; ++m) {
    std::size_t best = cols;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < cols; ++n) {
      if (taken[n]) continue;
      if (best == cols || cost(m, n) < best_cost) {
        best_cost = cost(m, n);
        best = n;
      }
    }
    taken[best] = true;
    row_of_col[best] = static_cast<int>(m);
    ++assigned;
  }
  return row_of_col;
}

// Minimum-total-cost matching (Jonker-Volgenant style shortest augmenting
// paths). Same interface as the greedy variant; used behind the optional
// optimal-matching switch.
inline std::vector<int> optimal_min_matching(const RMat& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  if (cols > rows)
    throw std::invalid_argument("optimal_min_matching: more columns than reference rows");

  // Potentials formulation over the transposed matrix (columns become the
  // assigned side so each column receives a distinct row).
  const std::size_t n = cols;  // items to assign
  const std::size_t m = rows;  // resources
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_reduced(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(j - 1, i0 - 1) - u[i0] - v[j];
        if (reduced < min_reduced[j]) {
          min_reduced[j] = reduced;
          way[j] = j0;
        }
        if (min_reduced[j] < delta) {
          delta = min_reduced[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_reduced[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_of_col(cols, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) row_of_col[match[j] - 1] = static_cast<int>(j - 1);
  return row_of_col;
}

enum class MatchPolicy { greedy, optimal };

struct AssignmentStats {
  std::size_t interference_evaluations = 0;
};

// Location-aware tiered assignment. Tier-1 users receive the tau orthogonal
// pilots in tier order; each later tier is matched against the tier-1
// reference users by minimizing the pairwise LOS interference measure,
// with pilots unique within a tier. The measure for candidate pair (ref,
// cand) is evaluated under the hypothesis that cand joins ref's group as
// built so far. Deterministic: no randomness anywhere.
inline PilotAssignment assign_location_aware(const UserDrop& drop, int tau,
                                             const CellConfig& cell, const TrainingConfig& cfg,
                                             MatchPolicy policy = MatchPolicy::greedy,
                                             AssignmentStats* stats = nullptr) {
  if (tau < 1 || tau > drop.size())
    throw std::invalid_argument("assign_location_aware: tau must satisfy 1 <= tau <= N");
  if (cfg.tau() != tau)
    throw std::invalid_argument("assign_location_aware: training config tau mismatch");

  const TierPartition tiers = partition_tiers(drop, tau);
  const auto betas = large_scale_gains(drop, cell);
  const auto ks = detail::k_factors_of(drop);

  std::vector<std::vector<int>> groups(static_cast<std::size_t>(tau));
  const std::vector<int>& tier1 = tiers.tiers.front();
  for (std::size_t m = 0; m < tier1.size(); ++m) groups[m] = {tier1[m]};

  std::size_t evaluations = 0;
  std::vector<int> hypothesis;
  for (std::size_t t = 1; t < tiers.tiers.size(); ++t) {
    const std::vector<int>& tier = tiers.tiers[t];
    RMat cost(static_cast<std::size_t>(tau), tier.size());
    for (std::size_t m = 0; m < static_cast<std::size_t>(tau); ++m) {
      const int ref = tier1[m];
      for (std::size_t n = 0; n < tier.size(); ++n) {
        hypothesis = groups[m];
        hypothesis.push_back(tier[n]);
        cost(m, n) = detail::pairwise_interference_from_gains(drop, cell, cfg, ref, tier[n],
                                                              hypothesis, betas, ks)
                         .value;
        ++evaluations;
      }
    }
    const std::vector<int> row_of_col =
        policy == MatchPolicy::greedy ? unique_min_matching(cost) : optimal_min_matching(cost);
    for (std::size_t n = 0; n < tier.size(); ++n)
      groups[static_cast<std::size_t>(row_of_col[n])].push_back(tier[n]);
  }

  if (stats) stats->interference_evaluations = evaluations;
  return PilotAssignment(tau, std::move(groups));
}

// Uniformly random balanced partition: users are shuffled, then dealt into
// tau groups of size N/tau with the remainder going to the first N mod tau
// groups.
inline PilotAssignment assign_random(int n_users, int tau, Rng& rng) {
  if (tau < 1 || tau > n_users)
    throw std::invalid_argument("assign_random: tau must satisfy 1 <= tau <= N");

  std::vector<int> perm(static_cast<std::size_t>(n_users));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  const int base = n_users / tau;
  const int remainder = n_users % tau;
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(tau));
  std::size_t cursor = 0;
  for (int m = 0; m < tau; ++m) {
    const int size = base + (m < remainder ? 1 : 0);
    auto& group = groups[static_cast<std::size_t>(m)];
    group.assign(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                 perm.begin() + static_cast<std::ptrdiff_t>(cursor + static_cast<std::size_t>(size)));
    cursor += static_cast<std::size_t>(size);
  }
  return PilotAssignment(tau, std::move(groups));
}

namespace detail {

inline std::uint64_t mul_capped(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap + 1;
  const std::uint64_t p = a * b;
  return p > cap ? cap + 1 : p;
}

inline std::uint64_t binom_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = mul_capped(result, static_cast<std::uint64_t>(n - k + i), cap);
    if (result > cap) return cap + 1;
    result /= static_cast<std::uint64_t>(i);
  }
  return result;
}

// Number of partitions of a pool of `count` users into groups of equal
// `size` under the smallest-remaining-anchor rule (each unordered partition
// counted once).
inline std::uint64_t equal_partition_count(int count, int size, std::uint64_t cap) {
  std::uint64_t total = 1;
  while (count > 0) {
    total = mul_capped(total, binom_capped(count - 1, size - 1, cap), cap);
    if (total > cap) return cap + 1;
    count -= size;
  }
  return total;
}

template <typename Fn>
void for_each_combination(const std::vector<int>& pool, int choose, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(choose));
  std::iota(idx.begin(), idx.end(), 0);
  const int n = static_cast<int>(pool.size());
  std::vector<int> picked(static_cast<std::size_t>(choose));
  for (;;) {
    for (int i = 0; i < choose; ++i)
      picked[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    fn(picked);
    int i = choose - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - choose + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < choose; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Enumerates unordered partitions of `pool` into groups of equal `size`:
// the smallest remaining user anchors each group in turn.
template <typename Fn>
void for_each_equal_partition(std::vector<int> pool, int size,
                              std::vector<std::vector<int>>& groups, Fn&& fn) {
  if (pool.empty()) {
    fn(groups);
    return;
  }
  const int anchor = pool.front();
  const std::vector<int> rest(pool.begin() + 1, pool.end());
  for_each_combination(rest, size - 1, [&](const std::vector<int>& mates) {
    std::vector<int> group;
    group.reserve(static_cast<std::size_t>(size));
    group.push_back(anchor);
    group.insert(group.end(), mates.begin(), mates.end());

    std::vector<int> remaining;
    remaining.reserve(rest.size() - mates.size());
    std::size_t cursor = 0;
    for (int user : rest) {
      if (cursor < mates.size() && mates[cursor] == user) {
        ++cursor;
        continue;
      }
      remaining.push_back(user);
    }
    groups.push_back(std::move(group));
    for_each_equal_partition(remaining, size, groups, fn);
    groups.pop_back();
  });
}

}  // namespace detail

// Number of distinct balanced partitions of n_users into tau groups
// (saturates at cap + 1).
inline std::uint64_t count_balanced_partitions(int n_users, int tau,
                                               std::uint64_t cap = 1'000'000) {
  if (tau < 1 || tau > n_users) return 0;
  const int base = n_users / tau;
  const int remainder = n_users % tau;
  if (remainder == 0) return detail::equal_partition_count(n_users, base, cap);
  const int big_members = remainder * (base + 1);
  std::uint64_t total = detail::binom_capped(n_users, big_members, cap);
  total = detail::mul_capped(total, detail::equal_partition_count(big_members, base + 1, cap), cap);
  total = detail::mul_capped(
      total, detail::equal_partition_count(n_users - big_members, base, cap), cap);
  return total;
}

// Brute-force minimizer of the total LOS interference over all balanced
// partitions; a validation oracle for small instances. Ties keep the first
// partition enumerated.
inline PilotAssignment assign_exhaustive(const UserDrop& drop, int tau, const CellConfig& cell,
                                         const TrainingConfig& cfg,
                                         std::uint64_t max_partitions = 1'000'000) {
  const int n_users = drop.size();
  if (tau < 1 || tau > n_users)
    throw std::invalid_argument("assign_exhaustive: tau must satisfy 1 <= tau <= N");
  const std::uint64_t count = count_balanced_partitions(n_users, tau, max_partitions);
  if (count > max_partitions)
    throw std::invalid_argument("assign_exhaustive: more than " + std::to_string(max_partitions) +
                                " balanced partitions; instance too large");

  const int base = n_users / tau;
  const int remainder = n_users % tau;
  std::vector<int> all(static_cast<std::size_t>(n_users));
  std::iota(all.begin(), all.end(), 0);

  double best_total = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> best_groups;
  const auto consider = [&](const std::vector<std::vector<int>>& groups) {
    const PilotAssignment candidate(tau, groups);
    const double total = total_interference(drop, candidate, cell, cfg).total;
    if (total < best_total) {
      best_total = total;
      best_groups = groups;
    }
  };

  std::vector<std::vector<int>> scratch;
  if (remainder == 0) {
    detail::for_each_equal_partition(all, base, scratch, consider);
  } else {
    const int big_members = remainder * (base + 1);
    detail::for_each_combination(all, big_members, [&](const std::vector<int>& big_class) {
      std::vector<int> small_class;
      small_class.reserve(static_cast<std::size_t>(n_users - big_members));
      std::size_t cursor = 0;
      for (int user : all) {
        if (cursor < big_class.size() && big_class[cursor] == user) {
          ++cursor;
          continue;
        }
        small_class.push_back(user);
      }
      std::vector<std::vector<int>> big_groups;
      detail::for_each_equal_partition(
          big_class, base + 1, big_groups, [&](const std::vector<std::vector<int>>& bg) {
            std::vector<std::vector<int>> tail;
            detail::for_each_equal_partition(
                small_class, base, tail, [&](const std::vector<std::vector<int>>& sg) {
                  std::vector<std::vector<int>> groups = bg;
                  groups.insert(groups.end(), sg.begin(), sg.end());
                  consider(groups);
                });
          });
    });
  }
  return PilotAssignment(tau, std::move(best_groups));
}

}  // namespace lapa
