#include "cmab/simulation.hpp"

#include <algorithm>

#include "cmab/environment.hpp"
#include "cmab/equilibrium.hpp"
#include "cmab/rng.hpp"
#include "cmab/selfish_policy.hpp"
#include "cmab/social_policy.hpp"

namespace cmab {

const char* to_string(Policy p) {
  switch (p) {
    case Policy::kSelfish: return "selfish";
    case Policy::kSocial: return "social";
    case Policy::kHiding: return "hiding";
    case Policy::kCisp: return "cisp";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  if (name == "selfish") return Policy::kSelfish;
  if (name == "social") return Policy::kSocial;
  if (name == "hiding") return Policy::kHiding;
  if (name == "cisp") return Policy::kCisp;
  throw ConfigError("policy", "unknown policy '" + name + "' (expected selfish, social, hiding or cisp)");
}

std::vector<std::vector<double>> random_priors(int n_players, std::size_t num_arms, std::uint64_t seed) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n_players), std::vector<double>(num_arms));
  for (int p = 0; p < n_players; ++p) {
    CounterRng rng(seed, Stream::kPriors, static_cast<std::uint32_t>(p), 0);
    for (double& v : out[static_cast<std::size_t>(p)]) v = rng.uniform01();
  }
  return out;
}

namespace {

class Recorder {
 public:
  Recorder(const Scenario& s, Trajectory& traj) : s_(s), traj_(traj), weight_(1.0) {
    traj_.discounted_payoff.assign(static_cast<std::size_t>(s.n_players), 0.0);
  }

  void round(const RoundOutcome& outcome, double worst_gain, double error, std::span<const double> payoff,
             std::span<const BeliefState> beliefs) {
    double total = 0.0;
    for (int r : outcome.realized_rewards) total += r;
    traj_.social_reward.push_back(total);
    traj_.learning_error.push_back(error);
    traj_.trace.push_back({outcome.choices, worst_gain});
    traj_.max_occupancy.push_back(*std::max_element(outcome.occupancy.begin(), outcome.occupancy.end()));
    std::vector<double> tracked;
    tracked.reserve(beliefs.size());
    for (const BeliefState& b : beliefs) tracked.push_back(b.empirical_mean(s_.tracked_arm));
    traj_.tracked_means.push_back(std::move(tracked));
    for (std::size_t p = 0; p < payoff.size(); ++p) traj_.discounted_payoff[p] += weight_ * payoff[p];
    weight_ *= s_.rho;
  }

 private:
  const Scenario& s_;
  Trajectory& traj_;
  double weight_;
};

std::vector<double> as_payoff(const RoundOutcome& outcome) {
  return {outcome.realized_rewards.begin(), outcome.realized_rewards.end()};
}

void observe(std::vector<BeliefState>& beliefs, const RoundOutcome& outcome) {
  for (PlayerIndex p = 0; p < beliefs.size(); ++p) {
    const Observation obs = outcome.collision_flags[p] ? Observation::collided()
                                                       : Observation::pulled(outcome.realized_rewards[p]);
    beliefs[p].record(outcome.choices[p], obs);
  }
}

std::vector<BeliefState> initial_beliefs(const Scenario& s) {
  std::vector<BeliefState> out;
  for (int p = 0; p < s.n_players; ++p)
    out.emplace_back(s.priors[static_cast<std::size_t>(p)], static_cast<PlayerIndex>(p));
  return out;
}

void run_selfish(const Scenario& s, Trajectory& traj, std::uint32_t salt) {
  ArmEnvironment env(s.true_means, s.min_gap, s.seed, salt);
  std::vector<BeliefState> beliefs = initial_beliefs(s);
  Recorder rec(s, traj);
  std::vector<ArmIndex> choices(beliefs.size());
  std::vector<std::vector<double>> means(beliefs.size());
  for (Round t = 1; t <= s.horizon; ++t) {
    for (PlayerIndex p = 0; p < beliefs.size(); ++p) {
      choices[p] = t == 1 ? init_decide(beliefs[p], s.rho, s.n_players)
                          : decide(beliefs[p], choices[p], s.rho, s.n_players);
      means[p] = beliefs[p].means();
    }
    const double gain = certify_epsilon_ne(choices, std::span<const std::vector<double>>(means), 0.0).worst_gain;
    const RoundOutcome outcome = env.resolve(choices);
    observe(beliefs, outcome);
    rec.round(outcome, gain, learning_error(beliefs, s.true_means), as_payoff(outcome), beliefs);
  }
  traj.final_beliefs = std::move(beliefs);
}

void run_social(const Scenario& s, Trajectory& traj) {
  ArmEnvironment env(s.true_means, s.min_gap, s.seed);
  std::vector<BeliefState> beliefs = initial_beliefs(s);
  Recorder rec(s, traj);
  std::optional<std::vector<ArmIndex>> previous;
  for (Round t = 1; t <= s.horizon; ++t) {
    const BeliefState planner = aggregate_planner_belief(beliefs);
    const OptimalArmSet set = select_arm_set(planner, s.n_players, s.rho);
    std::vector<ArmIndex> choices = assign_players(set.arms, previous);
    const double gain = certify_epsilon_ne(choices, planner.means(), 0.0).worst_gain;
    const RoundOutcome outcome = env.resolve(choices);
    observe(beliefs, outcome);
    const BeliefState after = aggregate_planner_belief(beliefs);
    const std::vector<BeliefState> shared(beliefs.size(), after);
    rec.round(outcome, gain, learning_error_shared(after, s.true_means, s.n_players), as_payoff(outcome), shared);
    previous = std::move(choices);
  }
  traj.final_beliefs = std::move(beliefs);
}

void run_cisp(const Scenario& s, Trajectory& traj) {
  ArmEnvironment env(s.true_means, s.min_gap, s.seed);
  std::vector<CispPlayer> players;
  for (BeliefState& b : initial_beliefs(s)) players.push_back({std::move(b), std::nullopt});
  CispMechanism mech(s.n_players, s.rho, s.penalty, s.adversary, s.seed);
  Recorder rec(s, traj);
  for (Round t = 1; t <= s.horizon; ++t) {
    const auto result = mech.run_round(players, env);
    const double gain = certify_epsilon_ne(result.outcome.choices, result.planner_belief.means(), 0.0).worst_gain;
    const BeliefState after = mech.current_planner_belief(players);
    const std::vector<BeliefState> shared(players.size(), after);
    rec.round(result.outcome, gain, learning_error_shared(after, s.true_means, s.n_players), result.net_payoff,
              shared);
    traj.balance_after_round.push_back(mech.ledger().running_balance());
  }
  traj.ledger = mech.ledger();
  for (CispPlayer& p : players) traj.final_beliefs.push_back(std::move(p.belief));
}

}  // namespace

Trajectory simulate(const Scenario& s) {
  if (s.n_players < 1) throw ConfigError("n_players", "need at least one player");
  if (s.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (!(s.rho >= 0.0 && s.rho < 1.0)) throw ConfigError("rho", "must lie in [0,1)");
  if (s.priors.size() != static_cast<std::size_t>(s.n_players))
    throw ConfigError("priors", "need one prior vector per player");
  for (const auto& row : s.priors)
    if (row.size() != s.true_means.size()) throw ConfigError("priors", "prior vectors must have one entry per arm");
  if (s.tracked_arm >= s.true_means.size()) throw ConfigError("tracked_arm", "arm index out of range");

  Trajectory traj;
  switch (s.policy) {
    case Policy::kSelfish: run_selfish(s, traj, 0); break;
    case Policy::kHiding: run_selfish(s, traj, kHidingCollisionSalt); break;
    case Policy::kSocial: run_social(s, traj); break;
    case Policy::kCisp: run_cisp(s, traj); break;
  }
  return traj;
}

std::vector<MetricsRecord> metrics_series(const Trajectory& traj, double rho, double epsilon, int window) {
  const std::optional<Round> conv = detect_convergence(traj.trace, epsilon, window);
  std::vector<MetricsRecord> out;
  out.reserve(traj.social_reward.size());
  double cumulative = 0.0, weight = 1.0;
  for (std::size_t i = 0; i < traj.social_reward.size(); ++i) {
    cumulative += weight * traj.social_reward[i];
    weight *= rho;
    MetricsRecord r;
    r.t = i + 1;
    r.learning_error = traj.learning_error[i];
    r.social_reward = traj.social_reward[i];
    r.discounted_cumulative = cumulative;
    r.convergence_round = conv;
    r.converged = conv && r.t >= *conv;
    out.push_back(r);
  }
  return out;
}

}  // namespace cmab
