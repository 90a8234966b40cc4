#include "cmab/selfish_policy.hpp"

#include <algorithm>
#include <limits>

#include "cmab/equilibrium.hpp"

namespace cmab {

double exploration_benefit(const ThresholdInputs& in) {
  const double ck = static_cast<double>(in.current_pulls);
  const double cj = static_cast<double>(in.candidate_pulls);
  if (in.candidate_pulls == 0) return in.current_pulls == 0 ? 0.0 : 1.0;
  const double ratio = (ck - cj) / (cj * (ck + 1.0));
  const double value = ratio * ((1.0 - in.stay_reward) / (in.expected_occupancy_candidate + 1.0));
  return std::clamp(value, -1.0, 1.0);
}

double switch_threshold(const ThresholdInputs& in) {
  return in.stay_reward - in.rho * exploration_benefit(in);
}

double expected_reward(double mean, int occupancy, bool already_there) {
  const int sharing = already_there ? std::max(occupancy, 1) : occupancy + 1;
  return mean / sharing;
}

ArmIndex decide(const BeliefState& belief, ArmIndex previous_arm, double rho, int n_players) {
  const std::size_t k_arms = belief.num_arms();
  if (previous_arm >= k_arms) throw ConfigError("previous_arm", "arm index out of range");
  const std::vector<double> means = belief.means();
  const std::vector<int> occ = equilibrium_occupancy(means, n_players).counts;
  const auto& pulls = belief.pull_counts();

  const double stay = expected_reward(means[previous_arm], occ[previous_arm], true);
  ArmIndex choice = previous_arm;
  double best_margin = 0.0;
  for (ArmIndex j = 0; j < k_arms; ++j) {
    if (j == previous_arm) continue;
    const ThresholdInputs in{previous_arm, j, stay, pulls[previous_arm], pulls[j],
                             static_cast<double>(occ[j]), rho};
    const double margin = expected_reward(means[j], occ[j], false) - switch_threshold(in);
    if (margin > best_margin) {
      best_margin = margin;
      choice = j;
    }
  }
  return choice;
}

ArmIndex init_decide(const BeliefState& belief, double /*rho*/, int n_players) {
  for (auto c : belief.pull_counts())
    if (c != 0) throw ConfigError("belief", "initial decision expects an unexplored belief");
  const std::vector<double>& priors = belief.priors();
  const std::vector<int> occ = equilibrium_occupancy(priors, n_players).counts;
  ArmIndex best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (ArmIndex k = 0; k < priors.size(); ++k) {
    const double v = expected_reward(priors[k], occ[k], occ[k] > 0);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

}  // namespace cmab
