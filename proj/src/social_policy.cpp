#include "cmab/social_policy.hpp"

#include <algorithm>
#include <numeric>

namespace cmab {

double social_benefit(std::int64_t current_pulls, std::int64_t candidate_pulls, double current_mean) {
  if (candidate_pulls == 0) return current_pulls == 0 ? 0.0 : 1.0;
  const double ck = static_cast<double>(current_pulls);
  const double cj = static_cast<double>(candidate_pulls);
  const double value = (ck - cj) / (cj * (ck + 1.0)) * (1.0 - current_mean);
  return std::clamp(value, -1.0, 1.0);
}

OptimalArmSet select_arm_set(const BeliefState& planner_belief, int n_players, double rho) {
  const std::size_t k_arms = planner_belief.num_arms();
  if (n_players < 1) throw ConfigError("n_players", "need at least one player");
  if (static_cast<std::size_t>(n_players) >= k_arms)
    throw ConfigError("n_players", "the planner needs strictly more arms than players");
  const std::vector<double> means = planner_belief.means();
  const auto& pulls = planner_belief.pull_counts();

  std::vector<ArmIndex> order(k_arms);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) { return means[a] > means[b]; });
  std::vector<bool> inside(k_arms, false);
  for (int i = 0; i < n_players; ++i) inside[order[i]] = true;

  OptimalArmSet out;
  const int cap = n_players * static_cast<int>(k_arms);
  for (;;) {
    double best_margin = 0.0;
    ArmIndex enter = k_arms, leave = k_arms;
    for (ArmIndex j = 0; j < k_arms; ++j) {
      if (inside[j]) continue;
      for (ArmIndex k = 0; k < k_arms; ++k) {
        if (!inside[k]) continue;
        const double threshold = means[k] - rho * social_benefit(pulls[k], pulls[j], means[k]);
        const double margin = means[j] - threshold;
        if (margin > best_margin) {
          best_margin = margin;
          enter = j;
          leave = k;
        }
      }
    }
    if (enter == k_arms) break;
    if (out.swap_passes == cap) {
      out.hit_pass_cap = true;
      break;
    }
    inside[enter] = true;
    inside[leave] = false;
    ++out.swap_passes;
  }
  for (ArmIndex k = 0; k < k_arms; ++k)
    if (inside[k]) out.arms.push_back(k);
  return out;
}

std::vector<ArmIndex> assign_players(std::span<const ArmIndex> arm_set,
                                     const std::optional<std::vector<ArmIndex>>& previous_assignment) {
  const std::size_t n = arm_set.size();
  if (previous_assignment && previous_assignment->size() != n)
    throw ConfigError("previous_assignment", "must cover exactly the players of the arm set");
  std::vector<ArmIndex> sorted(arm_set.begin(), arm_set.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("arm_set", "arms must be distinct");

  std::vector<std::optional<ArmIndex>> result(n);
  std::vector<bool> taken(n, false);  // indexed by position in `sorted`
  if (previous_assignment) {
    for (PlayerIndex p = 0; p < n; ++p) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), (*previous_assignment)[p]);
      if (it == sorted.end() || *it != (*previous_assignment)[p]) continue;
      const auto slot = static_cast<std::size_t>(it - sorted.begin());
      if (taken[slot]) continue;
      taken[slot] = true;
      result[p] = *it;
    }
  }
  std::size_t next_free = 0;
  std::vector<ArmIndex> out(n);
  for (PlayerIndex p = 0; p < n; ++p) {
    if (!result[p]) {
      while (taken[next_free]) ++next_free;
      taken[next_free] = true;
      result[p] = sorted[next_free];
    }
    out[p] = *result[p];
  }
  return out;
}

}  // namespace cmab
