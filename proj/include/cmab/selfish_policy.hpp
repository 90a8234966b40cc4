#pragma once

#include "cmab/beliefs.hpp"
#include "cmab/types.hpp"

namespace cmab {

/// Inputs to the pairwise stay-or-switch test of a player currently on
/// `current_arm` weighing `candidate_arm`.
struct ThresholdInputs {
  ArmIndex current_arm = 0;
  ArmIndex candidate_arm = 0;
  double stay_reward = 0.0;          // expected immediate reward of staying, in [0,1]
  std::int64_t current_pulls = 0;    // c_k
  std::int64_t candidate_pulls = 0;  // c_j
  double expected_occupancy_candidate = 0.0;  // predicted choosers of j, excluding the mover
  double rho = 0.0;
};

/// Informational value of one pull of the candidate relative to the current arm,
///   (c_k - c_j)(1 - r_k) / ((E[N_j] + 1)(c_k c_j + c_j)),
/// clamped to [-1, 1]. An unexplored candidate is worth +1 once the current
/// arm has been pulled; two unexplored arms are worth 0.
double exploration_benefit(const ThresholdInputs& in);

/// Minimum expected reward the candidate must beat: stay_reward - rho * benefit.
/// Matches the myopic threshold at rho = 0 and the full-benefit threshold at rho = 1.
double switch_threshold(const ThresholdInputs& in);

/// Expected immediate reward of `arm` for a player predicting `occupancy`
/// choosers there. Staying counts the player among them; joining adds one.
double expected_reward(double mean, int occupancy, bool already_there);

/// One selfish decision given the previous arm. Occupancy is predicted from the
/// equilibrium of the player's own beliefs; the player switches to the arm with
/// the largest positive margin r_j - T_{j,k}, lowest index on ties.
ArmIndex decide(const BeliefState& belief, ArmIndex previous_arm, double rho, int n_players);

/// First-round decision (no previous arm, all counts zero): best response to
/// the equilibrium occupancy predicted from the priors, lowest index on ties.
ArmIndex init_decide(const BeliefState& belief, double rho, int n_players);

}  // namespace cmab
