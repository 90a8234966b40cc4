#include "cmab/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cmab {

namespace {

double distance(const BeliefState& b, std::span<const double> mu) {
  if (b.num_arms() != mu.size()) throw ConfigError("beliefs", "belief and true_means lengths differ");
  double ss = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double d = mu[k] - b.empirical_mean(k);
    ss += d * d;
  }
  return std::sqrt(ss);
}

}  // namespace

double learning_error(std::span<const BeliefState> beliefs, std::span<const double> true_means) {
  if (beliefs.empty() || true_means.empty()) throw ConfigError("beliefs", "need at least one player and one arm");
  double total = 0.0;
  for (const BeliefState& b : beliefs) total += distance(b, true_means);
  return total / (static_cast<double>(beliefs.size()) * static_cast<double>(true_means.size()));
}

double learning_error_shared(const BeliefState& planner, std::span<const double> true_means, int n_players) {
  if (n_players < 1) throw ConfigError("n_players", "need at least one player");
  if (true_means.empty()) throw ConfigError("true_means", "need at least one arm");
  return distance(planner, true_means) / static_cast<double>(true_means.size());
}

double poa_bound(std::span<const double> sorted_means, int n_players) {
  if (n_players < 1) throw ConfigError("n_players", "need at least one player");
  if (static_cast<std::size_t>(n_players) > sorted_means.size())
    throw ConfigError("n_players", "cannot exceed the number of arms");
  for (std::size_t k = 1; k < sorted_means.size(); ++k)
    if (sorted_means[k] > sorted_means[k - 1]) throw ConfigError("true_means", "means must be sorted non-increasing");
  if (!(sorted_means[0] > 0.0)) throw ConfigError("true_means", "largest mean must be positive");
  double tail = 0.0;
  for (int k = 1; k < n_players; ++k) tail += sorted_means[k];
  return 1.0 + tail / sorted_means[0];
}

double discounted_sum(std::span<const double> per_round_rewards, double rho) {
  double total = 0.0, weight = 1.0;
  for (double r : per_round_rewards) {
    total += weight * r;
    weight *= rho;
  }
  return total;
}

double inefficiency_ratio(std::span<const double> optimal_rewards, std::span<const double> test_rewards, double rho) {
  if (optimal_rewards.size() != test_rewards.size())
    throw ConfigError("horizon", "trajectories have different lengths");
  const double denom = discounted_sum(test_rewards, rho);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return discounted_sum(optimal_rewards, rho) / denom;
}

std::optional<Round> detect_convergence(std::span<const ConvergenceSample> trace, double epsilon, int window) {
  if (epsilon < 0.0) throw ConfigError("epsilon", "must be non-negative");
  if (window < 1) throw ConfigError("window", "must be at least 1");
  const std::size_t w = static_cast<std::size_t>(window);
  // run[i]: rounds i, i+1, ... sharing the choice vector of round i.
  std::vector<std::size_t> run(trace.size(), 1);
  for (std::size_t i = trace.size(); i-- > 1;) {
    if (i < trace.size() && trace[i].choices == trace[i - 1].choices) run[i - 1] = run[i] + 1;
  }
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace[i].worst_gain <= epsilon && run[i] >= w) return static_cast<Round>(i + 1);
  return std::nullopt;
}

const char* metrics_csv_header() {
  return "replication,t,learning_error,social_reward,discounted_cumulative,converged";
}

std::string metrics_csv_row(std::size_t replication, const MetricsRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << replication << ',' << r.t << ',' << r.learning_error << ',' << r.social_reward << ','
     << r.discounted_cumulative << ',' << (r.converged ? 1 : 0);
  return os.str();
}

}  // namespace cmab
