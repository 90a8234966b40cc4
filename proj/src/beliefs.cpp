#include "cmab/beliefs.hpp"

#include <string>

namespace cmab {

BeliefState::BeliefState(std::vector<double> priors, std::optional<PlayerIndex> owner)
    : priors_(std::move(priors)),
      successes_(priors_.size(), 0),
      pulls_(priors_.size(), 0),
      owner_(owner) {
  for (double p : priors_)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("priors", "prior must lie in [0,1]");
}

BeliefState::BeliefState(std::vector<double> priors, std::vector<std::int64_t> success_counts,
                         std::vector<std::int64_t> pull_counts, std::optional<PlayerIndex> owner)
    : priors_(std::move(priors)),
      successes_(std::move(success_counts)),
      pulls_(std::move(pull_counts)),
      owner_(owner) {
  if (successes_.size() != priors_.size() || pulls_.size() != priors_.size())
    throw ConfigError("belief", "priors, success_counts and pull_counts must have equal length");
  for (std::size_t k = 0; k < priors_.size(); ++k) {
    if (!(priors_[k] >= 0.0 && priors_[k] <= 1.0)) throw ConfigError("priors", "prior must lie in [0,1]");
    if (successes_[k] < 0 || successes_[k] > pulls_[k])
      throw ConfigError("success_counts", "need 0 <= successes <= pulls on arm " + std::to_string(k));
  }
}

double BeliefState::empirical_mean(ArmIndex k) const {
  if (pulls_.at(k) == 0) return priors_[k];
  return static_cast<double>(successes_[k]) / static_cast<double>(pulls_[k]);
}

std::vector<double> BeliefState::means() const {
  std::vector<double> out(priors_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = empirical_mean(k);
  return out;
}

void BeliefState::record(ArmIndex arm, Observation obs) {
  if (arm >= priors_.size()) throw ConfigError("arm", "arm index out of range");
  if (obs.kind != Observation::Kind::kPulled) return;
  pulls_[arm] += 1;
  successes_[arm] += obs.reward != 0 ? 1 : 0;
}

BeliefState update(BeliefState belief, ArmIndex arm, Observation obs) {
  belief.record(arm, obs);
  return belief;
}

BeliefState aggregate_planner_belief(std::span<const BeliefState> reports) {
  if (reports.empty()) throw ConfigError("reports", "at least one report is required");
  const std::size_t k_arms = reports.front().num_arms();
  std::vector<double> priors(k_arms, 0.0);
  std::vector<std::int64_t> successes(k_arms, 0), pulls(k_arms, 0);
  for (const BeliefState& r : reports) {
    if (r.num_arms() != k_arms) throw ConfigError("reports", "reports disagree on the number of arms");
    for (std::size_t k = 0; k < k_arms; ++k) {
      priors[k] += r.priors()[k];
      successes[k] += r.success_counts()[k];
      pulls[k] += r.pull_counts()[k];
    }
  }
  for (double& p : priors) p /= static_cast<double>(reports.size());
  return BeliefState(std::move(priors), std::move(successes), std::move(pulls), std::nullopt);
}

double one_step_expectation(const BeliefState& belief, ArmIndex arm) {
  const std::int64_t c = belief.pull_counts().at(arm);
  if (c < 1) throw ConfigError("pull_counts", "one-step expectation needs at least one pull");
  const double s = static_cast<double>(belief.success_counts()[arm]);
  const double mu = belief.empirical_mean(arm);
  const double next = static_cast<double>(c + 1);
  return mu * ((s + 1.0) / next) + (1.0 - mu) * (s / next);
}

Rational one_step_expectation_exact(const BeliefState& belief, ArmIndex arm) {
  const std::int64_t c = belief.pull_counts().at(arm);
  if (c < 1) throw ConfigError("pull_counts", "one-step expectation needs at least one pull");
  const std::int64_t s = belief.success_counts()[arm];
  const Rational mu(s, c);
  return mu * Rational(s + 1, c + 1) + (Rational(1) - mu) * Rational(s, c + 1);
}

}  // namespace cmab
