// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lapa/matrix.hpp"

namespace lapa {

// Checks that `groups` is a partition of {0..n_users-1} into tau disjoint
// sets. Returns human-readable violations (1-based user labels); empty means
// valid.
inline std::vector<std::string> validate_groups(int tau,
                                                const std::vector<std::vector<int>>& groups,
                                                int n_users) {
  std::vector<std::string> violations;
  if (tau < 1) violations.push_back("tau must be >= 1");
  if (n_users < 1) violations.push_back("n_users must be >= 1");
  if (tau > n_users)
    violations.push_back("tau (" + std::to_string(tau) + ") exceeds number of users (" +
                         std::to_string(n_users) + ")");
  if (static_cast<int>(groups.size()) != tau)
    violations.push_back("expected " + std::to_string(tau) + " groups, got " +
                         std::to_string(groups.size()));

  std::vector<int> seen(static_cast<std::size_t>(std::max(n_users, 0)), 0);
  for (const auto& group : groups) {
    for (int user : group) {
      if (user < 0 || user >= n_users) {
        violations.push_back("user " + std::to_string(user + 1) + " is out of range 1.." +
                             std::to_string(n_users));
        continue;
      }
      if (++seen[static_cast<std::size_t>(user)] == 2)
        violations.push_back("user " + std::to_string(user + 1) +
                             " is assigned to more than one group");
    }
  }
  for (int user = 0; user < n_users; ++user)
    if (seen[static_cast<std::size_t>(user)] == 0)
      violations.push_back("user " + std::to_string(user + 1) + " is not assigned to any group");
  return violations;
}

// Partition of users into tau pilot groups Psi_1..Psi_tau. Immutable once
// constructed; construction validates the partition invariants.
class PilotAssignment {
 public:
  PilotAssignment(int tau, std::vector<std::vector<int>> groups)
      : tau_(tau), groups_(std::move(groups)) {
    int n_users = 0;
    for (const auto& g : groups_) n_users += static_cast<int>(g.size());
    const auto violations = validate_groups(tau_, groups_, n_users);
    if (!violations.empty())
      throw std::invalid_argument("invalid pilot assignment: " + violations.front());
    user_to_pilot_.assign(static_cast<std::size_t>(n_users), -1);
    for (int m = 0; m < tau_; ++m)
      for (int user : groups_[static_cast<std::size_t>(m)])
        user_to_pilot_[static_cast<std::size_t>(user)] = m;
  }

  static PilotAssignment from_user_to_pilot(const std::vector<int>& user_to_pilot, int tau) {
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(std::max(tau, 0)));
    for (std::size_t n = 0; n < user_to_pilot.size(); ++n) {
      const int pilot = user_to_pilot[n];
      if (pilot < 0 || pilot >= tau)
        throw std::invalid_argument("pilot index out of range for user " + std::to_string(n + 1));
      groups[static_cast<std::size_t>(pilot)].push_back(static_cast<int>(n));
    }
    return PilotAssignment(tau, std::move(groups));
  }

  int tau() const noexcept { return tau_; }
  int n_users() const noexcept { return static_cast<int>(user_to_pilot_.size()); }
  const std::vector<std::vector<int>>& groups() const noexcept { return groups_; }
  const std::vector<int>& user_to_pilot() const noexcept { return user_to_pilot_; }
  int pilot_of(int user) const { return user_to_pilot_.at(static_cast<std::size_t>(user)); }
  const std::vector<int>& group_of(int user) const {
    return groups_[static_cast<std::size_t>(pilot_of(user))];
  }

 private:
  int tau_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> user_to_pilot_;
};

// tau x N pilot matrix Phi whose column n is the canonical basis vector of
// the pilot assigned to user n. Sequences within the set are orthonormal;
// any unitary rotation of the basis leaves R_Phi unchanged.
class PilotMatrix {
 public:
  explicit PilotMatrix(const PilotAssignment& assignment)
      : tau_(assignment.tau()),
        phi_(static_cast<std::size_t>(assignment.tau()),
             static_cast<std::size_t>(assignment.n_users())),
        user_to_pilot_(assignment.user_to_pilot()) {
    for (int n = 0; n < assignment.n_users(); ++n)
      phi_(static_cast<std::size_t>(assignment.pilot_of(n)), static_cast<std::size_t>(n)) = 1.0;
  }

  int tau() const noexcept { return tau_; }
  int n_users() const noexcept { return static_cast<int>(phi_.cols()); }
  const RMat& phi() const noexcept { return phi_; }
  int pilot_of(int user) const { return user_to_pilot_.at(static_cast<std::size_t>(user)); }

  // R_Phi = Phi^T Phi; entry (n,i) is 1 iff users n and i share a pilot.
  RMat correlation() const {
    RMat phi_t(phi_.cols(), phi_.rows());
    for (std::size_t i = 0; i < phi_.rows(); ++i)
      for (std::size_t j = 0; j < phi_.cols(); ++j) phi_t(j, i) = phi_(i, j);
    return matmul(phi_t, phi_);
  }

 private:
  int tau_;
  RMat phi_;
  std::vector<int> user_to_pilot_;
};

inline PilotMatrix build_pilot_matrix(const PilotAssignment& assignment, int n_users) {
  if (assignment.n_users() != n_users)
    throw std::invalid_argument("assignment covers " + std::to_string(assignment.n_users()) +
                                " users, expected " + std::to_string(n_users));
  return PilotMatrix(assignment);
}

// Rotates the canonical sequences by a unitary tau x tau matrix. The rotated
// set has the same correlation matrix, so estimation behaviour is unchanged.
inline CMat rotate_pilots(const PilotMatrix& pilots, const CMat& unitary) {
  if (unitary.rows() != static_cast<std::size_t>(pilots.tau()) ||
      unitary.cols() != static_cast<std::size_t>(pilots.tau()))
    throw std::invalid_argument("unitary must be tau x tau");
  CMat phi_c(pilots.phi().rows(), pilots.phi().cols());
  for (std::size_t j = 0; j < phi_c.cols(); ++j)
    for (std::size_t i = 0; i < phi_c.rows(); ++i) phi_c(i, j) = pilots.phi()(i, j);
  return matmul(unitary, phi_c);
}

}  // namespace lapa
