#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmab/types.hpp"

namespace cmab {

/// What the belief owner learned about one arm in one round.
struct Observation {
  enum class Kind { kPulled, kCollided, kNotChosen };
  Kind kind = Kind::kNotChosen;
  int reward = 0;

  static Observation pulled(int r) { return {Kind::kPulled, r}; }
  static Observation collided() { return {Kind::kCollided, 0}; }
  static Observation not_chosen() { return {Kind::kNotChosen, 0}; }
};

/// Empirical-mean bookkeeping for one player, or for the planner when owner is empty.
///
/// Counts are stored as integers so that updates are exact and replays are
/// bit-stable; the empirical mean is derived on demand and equals the prior
/// until the first successful pull.
class BeliefState {
 public:
  BeliefState() = default;
  BeliefState(std::vector<double> priors, std::optional<PlayerIndex> owner);
  BeliefState(std::vector<double> priors, std::vector<std::int64_t> success_counts,
              std::vector<std::int64_t> pull_counts, std::optional<PlayerIndex> owner);

  std::size_t num_arms() const noexcept { return priors_.size(); }
  const std::vector<double>& priors() const noexcept { return priors_; }
  const std::vector<std::int64_t>& success_counts() const noexcept { return successes_; }
  const std::vector<std::int64_t>& pull_counts() const noexcept { return pulls_; }
  std::optional<PlayerIndex> owner() const noexcept { return owner_; }

  double empirical_mean(ArmIndex k) const;
  std::vector<double> means() const;

  /// Only a successful pull changes state; collisions and idle arms leave it untouched.
  void record(ArmIndex arm, Observation obs);

  bool operator==(const BeliefState&) const = default;

 private:
  std::vector<double> priors_;
  std::vector<std::int64_t> successes_;
  std::vector<std::int64_t> pulls_;
  std::optional<PlayerIndex> owner_;
};

BeliefState update(BeliefState belief, ArmIndex arm, Observation obs);

/// Pools per-player counts. Arms nobody has pulled fall back to the mean of
/// the players' priors. Throws ConfigError on mismatched arm counts.
BeliefState aggregate_planner_belief(std::span<const BeliefState> reports);

/// Expected empirical mean after one more pull of `arm` under the owner's own
/// belief. Requires pull_counts[arm] >= 1.
double one_step_expectation(const BeliefState& belief, ArmIndex arm);

using Rational = boost::rational<std::int64_t>;

/// Same quantity in exact rational arithmetic.
Rational one_step_expectation_exact(const BeliefState& belief, ArmIndex arm);

}  // namespace cmab
