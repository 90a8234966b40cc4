#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmab/types.hpp"

namespace cmab {

/// Joint record of one round: who chose what, who collided, what was paid out.
struct RoundOutcome {
  std::vector<ArmIndex> choices;
  std::vector<bool> collision_flags;
  std::vector<int> realized_rewards;
  std::vector<int> occupancy;
  /// Set only for players that lost a collision: the number of choosers on their arm.
  std::vector<std::optional<int>> observed_occupancy;
};

/// Ground truth for a K-arm Bernoulli bandit shared by N competing players.
///
/// Reward draws r_k(t) and collision lotteries are taken from separate Philox
/// streams keyed by (seed, round, arm). A given arm therefore yields the same
/// reward in a given round no matter which policy is being simulated, which
/// is what makes cross-policy comparisons paired.
class ArmEnvironment {
 public:
  /// Throws ConfigError unless every mean lies strictly inside (0, 1) and
  /// min_gap is positive. The pairwise-gap assumption is checked separately
  /// by satisfies_min_gap().
  ArmEnvironment(std::vector<double> true_means, double min_gap, std::uint64_t seed,
                 std::uint32_t collision_salt = 0);

  std::size_t num_arms() const noexcept { return true_means_.size(); }
  const std::vector<double>& true_means() const noexcept { return true_means_; }
  double min_gap() const noexcept { return min_gap_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Number of rounds resolved so far; the next call to resolve() is round current_round()+1.
  Round current_round() const noexcept { return round_; }

  /// True iff |mu_i - mu_j| > min_gap for every pair of distinct arms.
  bool satisfies_min_gap() const noexcept;

  /// Bernoulli draw r_k(t) of arm k in round t (1-based).
  int reward_draw(Round t, ArmIndex arm) const noexcept;

  RoundOutcome resolve(std::span<const ArmIndex> choices);

 private:
  std::vector<double> true_means_;
  double min_gap_;
  std::uint64_t seed_;
  std::uint32_t collision_salt_;
  Round round_ = 0;
};

/// Resolves one round: per arm with m >= 1 choosers one is picked uniformly,
/// receives a fresh Bernoulli(mu_k) reward, the rest collide and get 0.
RoundOutcome resolve_round(std::span<const ArmIndex> choices, ArmEnvironment& env);

/// Runs `trials` lotteries among m identical choosers of one arm and returns how
/// often each chooser was selected. Requires m >= 2 and trials >= 1.
std::vector<double> selection_frequency_check(int m, int trials, std::uint64_t seed = 1);

}  // namespace cmab
