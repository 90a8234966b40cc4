#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cmab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Competitive multi-armed bandit simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config file or a built-in preset");
  std::string config_path, preset_name, out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  auto* config_opt = run->add_option("--config", config_path, "Experiment config (JSON)");
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in preset name");
  config_opt->excludes(preset_opt);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override base_seed");
  run->add_option("--replications", replications, "Override the number of replications");

  app.add_subcommand("list-presets", "Print the built-in preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("list-presets")) {
      for (const auto& name : cmab::preset_names()) std::cout << name << '\n';
      return 0;
    }
    if (config_path.empty() && preset_name.empty()) {
      std::cerr << "error: run needs --config <path> or --preset <name>\n";
      return 2;
    }
    cmab::ExperimentConfig config =
        config_path.empty() ? cmab::preset(preset_name) : cmab::load_config(config_path);
    if (seed) config.base_seed = *seed;
    if (replications) config.replications = *replications;
    if (!cmab::penalty_deters(config.penalty) &&
        std::find(config.policies.begin(), config.policies.end(), cmab::Policy::kCisp) != config.policies.end())
      std::cerr << "warning: penalty " << config.penalty << " does not exceed the largest per-round reward\n";
    const cmab::ExperimentResult result = cmab::run_experiment(config);
    cmab::emit_results(result, out_dir);
    std::cout << "wrote " << result.cells.size() << " cell(s) to " << out_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
