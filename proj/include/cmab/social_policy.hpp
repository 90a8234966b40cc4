#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cmab/beliefs.hpp"
#include "cmab/types.hpp"

namespace cmab {

/// Planner's exploration benefit of arm j over arm k, clamped to [-1, 1]:
///   (c_k - c_j)(1 - mu_k) / (c_k c_j + c_j).
/// Unexplored j against explored k is +1; both unexplored is 0.
double social_benefit(std::int64_t current_pulls, std::int64_t candidate_pulls, double current_mean);

struct OptimalArmSet {
  std::vector<ArmIndex> arms;  // ascending, exactly N distinct arms
  int swap_passes = 0;         // swaps performed before reaching the fixed point
  bool hit_pass_cap = false;
};

/// Collision-free arm set for N players. Starts from the N highest planner
/// means and repeatedly applies the single best swap (outside j for inside k
/// whenever mu_j > mu_k - rho * social_benefit) until none remains or N*K
/// swaps have been made. Throws ConfigError when N >= K.
OptimalArmSet select_arm_set(const BeliefState& planner_belief, int n_players, double rho);

/// Maps players onto the arm set. Players whose previous arm survives keep it;
/// vacancies go to the remaining players in ascending index order, lowest
/// free arm first. Returns the arm of each player.
std::vector<ArmIndex> assign_players(std::span<const ArmIndex> arm_set,
                                     const std::optional<std::vector<ArmIndex>>& previous_assignment);

}  // namespace cmab
