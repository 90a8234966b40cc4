#pragma once

#include <span>
#include <vector>

#include "cmab/types.hpp"

namespace cmab {

/// Pure-strategy occupancy of the one-shot congestion game in which a player
/// alone-or-sharing arm k earns mean_k / (number of choosers of k).
struct OccupancyProfile {
  std::vector<int> counts;
  std::vector<double> per_arm_value;  // mean_k / max(counts_k, 1)
};

/// Places players one at a time on the arm maximizing mean_a / (count_a + 1),
/// lowest arm index on ties. The result is a (weak) pure Nash equilibrium.
OccupancyProfile equilibrium_occupancy(std::span<const double> belief_means, int n_players);

struct NeCertificate {
  bool is_epsilon_ne = true;
  double worst_gain = 0.0;  // largest unilateral improvement found (may be negative)
};

/// Checks every player on arm k against its best unilateral move to k' != k,
/// valued mean_k' / (occupancy_k' + 1). Players share one belief.
NeCertificate certify_epsilon_ne(std::span<const ArmIndex> choices, std::span<const double> belief_means,
                                 double epsilon);

/// Same check with each player judged under its own belief vector.
NeCertificate certify_epsilon_ne(std::span<const ArmIndex> choices,
                                 std::span<const std::vector<double>> per_player_means, double epsilon);

/// Number of players per arm.
std::vector<int> occupancy_of(std::span<const ArmIndex> choices, std::size_t num_arms);

}  // namespace cmab
