#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmab/cisp.hpp"
#include "cmab/metrics.hpp"
#include "cmab/simulation.hpp"

namespace cmab {

struct PriorSpec {
  enum class Kind { kUniform, kRandom, kPerArm, kExplicit };
  Kind kind = Kind::kUniform;
  double value = 0.5;                         // kUniform
  std::optional<std::uint64_t> seed;          // kRandom; defaults to the replication seed
  std::vector<double> values;                 // kPerArm, shared by every player
  std::vector<std::vector<double>> matrix;    // kExplicit, n_players x K
};

struct MeanGenerator {
  double low = 0.1;
  double high = 0.9;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int n_players = 2;
  std::vector<int> sweep_n;  // when non-empty, replaces n_players
  int n_arms = 3;
  Round horizon = 100;
  double rho = 0.95;
  double eta = 0.01;
  double delta = 0.1;
  std::vector<double> true_means;
  std::optional<MeanGenerator> generator;  // evenly spaced from high (arm 0) down to low
  bool enforce_min_gap = true;
  PriorSpec priors;
  std::vector<Policy> policies{Policy::kSelfish};
  std::optional<AdversaryConfig> adversary;
  int replications = 1;
  std::uint64_t base_seed = 0;
  double epsilon = 1e-3;
  int window = 50;
  double penalty = 10.0;
  ArmIndex tracked_arm = 0;

  std::vector<int> player_counts() const;
};

/// Fills in generated means and checks every field; throws ConfigError naming the field.
void validate(ExperimentConfig& config);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& preset_names();
ExperimentConfig preset(const std::string& name);

/// Resolved per-player priors for one replication.
std::vector<std::vector<double>> resolve_priors(const PriorSpec& spec, int n_players, std::size_t num_arms,
                                                std::uint64_t replication_seed);

nlohmann::json belief_to_json(const BeliefState& b);
BeliefState belief_from_json(const nlohmann::json& j);

/// Aggregated outcome of one (policy, N) cell over all replications.
struct CellResult {
  Policy policy = Policy::kSelfish;
  int n_players = 0;
  std::vector<std::vector<MetricsRecord>> metrics;  // [replication][round]
  std::vector<std::optional<Round>> convergence;
  std::vector<double> discounted_social;          // per replication
  std::vector<double> paired_social_discounted;   // social run on the same seed
  std::vector<double> inefficiency;               // per replication
  double inefficiency_pooled = 1.0;
  std::vector<std::vector<double>> discounted_payoff;  // [replication][player]
  std::vector<int> max_occupancy;                 // per replication, over all rounds
  std::vector<std::vector<double>> tracked_mean;  // [player][round], averaged over replications
  std::vector<Ledger> ledgers;                    // CISP only
  std::vector<std::vector<double>> balance_after_round;  // CISP only
  std::vector<BeliefState> first_final_beliefs;   // replication 0
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
};

/// Runs every (policy, N) cell; replications execute concurrently and are
/// gathered in replication order so results do not depend on scheduling.
ExperimentResult run_experiment(ExperimentConfig config);

nlohmann::json cell_summary(const ExperimentConfig& config, const CellResult& cell);
nlohmann::json experiment_summary(const ExperimentResult& result);

/// Writes metrics.csv, ledger.csv (CISP) and summary.json. Experiments with
/// more than one cell get one `<policy>_n<N>/` subdirectory per cell plus a
/// top-level summary.json.
void emit_results(const ExperimentResult& result, const std::filesystem::path& output_dir);

}  // namespace cmab
