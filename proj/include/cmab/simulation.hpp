#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmab/beliefs.hpp"
#include "cmab/cisp.hpp"
#include "cmab/metrics.hpp"
#include "cmab/types.hpp"

namespace cmab {

enum class Policy { kSelfish, kSocial, kHiding, kCisp };

const char* to_string(Policy p);
/// Throws ConfigError("policy", ...) for unknown names.
Policy parse_policy(const std::string& name);

/// Collision-lottery salt of the information-hiding baseline; reward draws are
/// shared with every other policy, only tie-breaking among colliders differs.
inline constexpr std::uint32_t kHidingCollisionSalt = 0x4849;

/// Everything one replication needs. Priors are already resolved per player.
struct Scenario {
  Policy policy = Policy::kSelfish;
  std::vector<double> true_means;
  double min_gap = 0.01;
  int n_players = 1;
  Round horizon = 1;
  double rho = 0.95;
  std::vector<std::vector<double>> priors;  // n_players x K
  std::uint64_t seed = 0;
  double penalty = 10.0;
  std::optional<AdversaryConfig> adversary;
  ArmIndex tracked_arm = 0;
};

struct Trajectory {
  std::vector<double> social_reward;        // realized, summed over players, per round
  std::vector<double> learning_error;       // after each round's update
  std::vector<ConvergenceSample> trace;     // decisions and NE gain at decision time
  std::vector<int> max_occupancy;
  std::vector<std::vector<double>> tracked_means;  // [round][player] belief of tracked_arm
  std::vector<double> discounted_payoff;    // per player, realized reward plus transfers
  std::vector<double> balance_after_round;  // planner balance, CISP only
  Ledger ledger;                            // CISP only
  std::vector<BeliefState> final_beliefs;
};

/// Runs one replication to the horizon. Deterministic in the scenario.
Trajectory simulate(const Scenario& scenario);

/// Per-round metric rows, with the convergence round filled in from `trace`.
std::vector<MetricsRecord> metrics_series(const Trajectory& traj, double rho, double epsilon, int window);

/// Priors drawn uniformly from [0,1] for each player from the priors stream.
std::vector<std::vector<double>> random_priors(int n_players, std::size_t num_arms, std::uint64_t seed);

}  // namespace cmab
