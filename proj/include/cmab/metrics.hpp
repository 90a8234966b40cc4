#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmab/beliefs.hpp"
#include "cmab/types.hpp"

namespace cmab {

/// One row of a replication's metric series. Values at round t reflect the
/// beliefs after the round-t update.
struct MetricsRecord {
  Round t = 0;
  double learning_error = 0.0;
  double social_reward = 0.0;
  double discounted_cumulative = 0.0;
  bool converged = false;
  std::optional<Round> convergence_round;
};

/// (1/(N*K)) * sum_n ||mu - mu_tilde^n||_2.
double learning_error(std::span<const BeliefState> beliefs, std::span<const double> true_means);

/// Learning error when every player slot carries the same planner belief.
double learning_error_shared(const BeliefState& planner, std::span<const double> true_means, int n_players);

/// 1 + (mu_2 + ... + mu_N) / mu_1. Expects means sorted non-increasing and N <= K.
double poa_bound(std::span<const double> sorted_means, int n_players);

/// sum_t rho^(t-1) * reward_t.
double discounted_sum(std::span<const double> per_round_rewards, double rho);

/// Discounted optimal social reward over discounted test reward. Returns
/// +infinity when the test run earned nothing; throws on length mismatch.
double inefficiency_ratio(std::span<const double> optimal_rewards, std::span<const double> test_rewards, double rho);

/// What convergence detection needs from each round: the joint choice and the
/// largest unilateral gain any player saw under the beliefs it acted on.
struct ConvergenceSample {
  std::vector<ArmIndex> choices;
  double worst_gain = 0.0;
};

/// Earliest 1-based round t whose choice vector is an epsilon-NE and stays
/// unchanged through round t + window - 1.
std::optional<Round> detect_convergence(std::span<const ConvergenceSample> trace, double epsilon, int window);

/// Header line (without newline) of metrics.csv.
const char* metrics_csv_header();

std::string metrics_csv_row(std::size_t replication, const MetricsRecord& r);

}  // namespace cmab
