#include "cmab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace cmab {

using nlohmann::json;

std::vector<int> ExperimentConfig::player_counts() const {
  return sweep_n.empty() ? std::vector<int>{n_players} : sweep_n;
}

namespace {

std::vector<double> evenly_spaced(const MeanGenerator& g, int k) {
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    out[static_cast<std::size_t>(i)] = k == 1 ? g.high : g.high - (g.high - g.low) * i / (k - 1);
  return out;
}

void check_unit(const std::vector<double>& v, const char* field) {
  for (double x : v)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(field, "values must lie in [0,1]");
}

}  // namespace

void validate(ExperimentConfig& c) {
  if (c.n_arms < 2) throw ConfigError("n_arms", "need at least two arms");
  for (int n : c.player_counts()) {
    if (n < 1) throw ConfigError(c.sweep_n.empty() ? "n_players" : "sweep_n", "need at least one player");
    if (n >= c.n_arms) throw ConfigError(c.sweep_n.empty() ? "n_players" : "sweep_n", "must be below n_arms");
  }
  if (c.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (!(c.rho >= 0.0 && c.rho < 1.0)) throw ConfigError("rho", "must lie in [0,1)");
  if (!(c.eta > 0.0)) throw ConfigError("eta", "must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "must lie in (0,1)");
  if (c.generator) {
    if (!(c.generator->low > 0.0 && c.generator->low < c.generator->high && c.generator->high < 1.0))
      throw ConfigError("true_means", "generator needs 0 < low < high < 1");
    c.true_means = evenly_spaced(*c.generator, c.n_arms);
  }
  if (c.true_means.size() != static_cast<std::size_t>(c.n_arms))
    throw ConfigError("true_means", "need exactly n_arms entries");
  for (double mu : c.true_means)
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("true_means", "means must lie in (0,1)");
  if (c.enforce_min_gap) {
    for (std::size_t i = 0; i < c.true_means.size(); ++i)
      for (std::size_t j = i + 1; j < c.true_means.size(); ++j)
        if (!(std::abs(c.true_means[i] - c.true_means[j]) > c.eta))
          throw ConfigError("true_means", "arms " + std::to_string(i) + " and " + std::to_string(j) +
                                              " are closer than eta (set enforce_min_gap to false to allow)");
  }
  switch (c.priors.kind) {
    case PriorSpec::Kind::kUniform:
      if (!(c.priors.value >= 0.0 && c.priors.value <= 1.0)) throw ConfigError("priors.value", "must lie in [0,1]");
      break;
    case PriorSpec::Kind::kRandom: break;
    case PriorSpec::Kind::kPerArm:
      if (c.priors.values.size() != static_cast<std::size_t>(c.n_arms))
        throw ConfigError("priors.values", "need exactly n_arms entries");
      check_unit(c.priors.values, "priors.values");
      break;
    case PriorSpec::Kind::kExplicit:
      if (!c.sweep_n.empty()) throw ConfigError("priors.matrix", "explicit priors cannot be combined with sweep_n");
      if (c.priors.matrix.size() != static_cast<std::size_t>(c.n_players))
        throw ConfigError("priors.matrix", "need one row per player");
      for (const auto& row : c.priors.matrix) {
        if (row.size() != static_cast<std::size_t>(c.n_arms))
          throw ConfigError("priors.matrix", "each row needs n_arms entries");
        check_unit(row, "priors.matrix");
      }
      break;
  }
  if (c.policies.empty()) throw ConfigError("policy", "at least one policy is required");
  if (c.adversary) {
    for (int n : c.player_counts())
      if (c.adversary->player >= static_cast<PlayerIndex>(n))
        throw ConfigError("adversary.player", "no such player");
    if (!(c.adversary->report_bias >= 0.0)) throw ConfigError("adversary.report_bias", "must be non-negative");
    if (!(c.adversary->deviation_probability >= 0.0 && c.adversary->deviation_probability <= 1.0))
      throw ConfigError("adversary.deviation_probability", "must lie in [0,1]");
  }
  if (c.replications < 1) throw ConfigError("replications", "must be at least 1");
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon", "must be non-negative");
  if (c.window < 1) throw ConfigError("window", "must be at least 1");
  if (!(c.penalty >= 0.0)) throw ConfigError("penalty", "must be non-negative");
  if (c.tracked_arm >= static_cast<ArmIndex>(c.n_arms)) throw ConfigError("tracked_arm", "arm index out of range");
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

template <typename T>
void optional_field(const json& j, const char* key, T& out, const std::string& prefix = "") {
  if (j.contains(key)) out = field<T>(j, key, prefix + key);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& prefix) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(prefix + key, "unknown field");
  }
}

const char* prior_kind_name(PriorSpec::Kind k) {
  switch (k) {
    case PriorSpec::Kind::kUniform: return "uniform";
    case PriorSpec::Kind::kRandom: return "random";
    case PriorSpec::Kind::kPerArm: return "per_arm";
    case PriorSpec::Kind::kExplicit: return "explicit";
  }
  return "uniform";
}

PriorSpec priors_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("priors", "must be an object");
  reject_unknown(j, {"kind", "value", "seed", "values", "matrix"}, "priors.");
  PriorSpec p;
  const auto kind = field<std::string>(j, "kind", "priors.kind");
  if (kind == "uniform") {
    p.kind = PriorSpec::Kind::kUniform;
    optional_field(j, "value", p.value, "priors.");
  } else if (kind == "random") {
    p.kind = PriorSpec::Kind::kRandom;
    if (j.contains("seed")) p.seed = field<std::uint64_t>(j, "seed", "priors.seed");
  } else if (kind == "per_arm") {
    p.kind = PriorSpec::Kind::kPerArm;
    p.values = field<std::vector<double>>(j, "values", "priors.values");
  } else if (kind == "explicit") {
    p.kind = PriorSpec::Kind::kExplicit;
    p.matrix = field<std::vector<std::vector<double>>>(j, "matrix", "priors.matrix");
  } else {
    throw ConfigError("priors.kind", "expected uniform, random, per_arm or explicit");
  }
  return p;
}

json priors_to_json(const PriorSpec& p) {
  json j{{"kind", prior_kind_name(p.kind)}};
  switch (p.kind) {
    case PriorSpec::Kind::kUniform: j["value"] = p.value; break;
    case PriorSpec::Kind::kRandom:
      if (p.seed) j["seed"] = *p.seed;
      break;
    case PriorSpec::Kind::kPerArm: j["values"] = p.values; break;
    case PriorSpec::Kind::kExplicit: j["matrix"] = p.matrix; break;
  }
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
  reject_unknown(j,
                 {"name", "n_players", "sweep_n", "n_arms", "horizon", "rho", "eta", "delta", "true_means",
                  "enforce_min_gap", "priors", "policy", "adversary", "replications", "base_seed", "epsilon",
                  "window", "penalty", "tracked_arm"},
                 "");
  ExperimentConfig c;
  optional_field(j, "name", c.name);
  c.n_arms = field<int>(j, "n_arms", "n_arms");
  optional_field(j, "sweep_n", c.sweep_n);
  if (c.sweep_n.empty()) c.n_players = field<int>(j, "n_players", "n_players");
  else optional_field(j, "n_players", c.n_players);
  c.horizon = field<Round>(j, "horizon", "horizon");
  optional_field(j, "rho", c.rho);
  optional_field(j, "eta", c.eta);
  optional_field(j, "delta", c.delta);
  if (!j.contains("true_means")) throw ConfigError("true_means", "required");
  const json& tm = j.at("true_means");
  if (tm.is_object()) {
    reject_unknown(tm, {"generator", "low", "high"}, "true_means.");
    if (field<std::string>(tm, "generator", "true_means.generator") != "evenly_spaced")
      throw ConfigError("true_means.generator", "only evenly_spaced is supported");
    c.generator = MeanGenerator{field<double>(tm, "low", "true_means.low"), field<double>(tm, "high", "true_means.high")};
  } else {
    c.true_means = field<std::vector<double>>(j, "true_means", "true_means");
  }
  optional_field(j, "enforce_min_gap", c.enforce_min_gap);
  if (j.contains("priors")) c.priors = priors_from_json(j.at("priors"));
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    c.policies.clear();
    if (p.is_string()) {
      c.policies.push_back(parse_policy(p.get<std::string>()));
    } else if (p.is_array()) {
      for (const json& name : p) {
        if (!name.is_string()) throw ConfigError("policy", "entries must be strings");
        c.policies.push_back(parse_policy(name.get<std::string>()));
      }
    } else {
      throw ConfigError("policy", "must be a string or an array of strings");
    }
  }
  if (j.contains("adversary") && !j.at("adversary").is_null()) {
    const json& a = j.at("adversary");
    if (!a.is_object()) throw ConfigError("adversary", "must be an object");
    reject_unknown(a, {"player", "report_bias", "deviation_probability"}, "adversary.");
    AdversaryConfig adv;
    optional_field(a, "player", adv.player, "adversary.");
    optional_field(a, "report_bias", adv.report_bias, "adversary.");
    optional_field(a, "deviation_probability", adv.deviation_probability, "adversary.");
    c.adversary = adv;
  }
  optional_field(j, "replications", c.replications);
  optional_field(j, "base_seed", c.base_seed);
  optional_field(j, "epsilon", c.epsilon);
  optional_field(j, "window", c.window);
  optional_field(j, "penalty", c.penalty);
  optional_field(j, "tracked_arm", c.tracked_arm);
  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["n_players"] = c.n_players;
  if (!c.sweep_n.empty()) j["sweep_n"] = c.sweep_n;
  j["n_arms"] = c.n_arms;
  j["horizon"] = c.horizon;
  j["rho"] = c.rho;
  j["eta"] = c.eta;
  j["delta"] = c.delta;
  if (c.generator)
    j["true_means"] = {{"generator", "evenly_spaced"}, {"low", c.generator->low}, {"high", c.generator->high}};
  else
    j["true_means"] = c.true_means;
  j["enforce_min_gap"] = c.enforce_min_gap;
  j["priors"] = priors_to_json(c.priors);
  json policies = json::array();
  for (Policy p : c.policies) policies.push_back(to_string(p));
  j["policy"] = policies;
  if (c.adversary)
    j["adversary"] = {{"player", c.adversary->player},
                      {"report_bias", c.adversary->report_bias},
                      {"deviation_probability", c.adversary->deviation_probability}};
  j["replications"] = c.replications;
  j["base_seed"] = c.base_seed;
  j["epsilon"] = c.epsilon;
  j["window"] = c.window;
  j["penalty"] = c.penalty;
  j["tracked_arm"] = c.tracked_arm;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4a", "fig4b", "worst_case_poa"};
  return names;
}

namespace {

const std::vector<double> kBeliefMeans{0.22, 0.12, 0.98, 0.11, 0.09, 0.08, 0.14, 0.11};
const std::vector<double> kCloseMeans{0.99, 0.95, 0.94, 0.97, 0.98, 0.98, 0.94, 0.93, 0.92, 0.94, 0.95, 0.94};
const std::vector<double> kSpreadMeans{0.99, 0.24, 0.24, 0.24, 0.24, 0.08, 0.24, 0.23, 0.22, 0.24, 0.15, 0.24};

ExperimentConfig worst_case_base(const std::string& name, std::vector<double> means, double rho) {
  ExperimentConfig c;
  c.name = name;
  c.n_arms = 12;
  c.horizon = 2000;
  c.rho = rho;
  c.true_means = std::move(means);
  c.enforce_min_gap = false;
  c.priors.kind = PriorSpec::Kind::kPerArm;
  c.priors.values.assign(12, 0.05);
  c.priors.values[0] = 0.99;
  c.policies = {Policy::kSelfish, Policy::kHiding, Policy::kCisp};
  c.replications = 50;
  c.sweep_n = {2, 4, 6, 8, 10};
  c.n_players = 2;
  return c;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig2") {
    c.name = name;
    c.n_players = 5;
    c.n_arms = 8;
    c.horizon = 1000;
    c.true_means = kBeliefMeans;
    c.enforce_min_gap = false;
    c.priors.kind = PriorSpec::Kind::kRandom;
    c.policies = {Policy::kSelfish};
    c.replications = 100;
  } else if (name == "fig3") {
    c.name = name;
    c.n_players = 8;
    c.n_arms = 12;
    c.horizon = 500;
    c.true_means = kBeliefMeans;
    c.true_means.insert(c.true_means.end(), {0.09, 0.08, 0.14, 0.11});
    c.enforce_min_gap = false;
    c.priors.kind = PriorSpec::Kind::kUniform;
    c.priors.value = 0.5;
    c.policies = {Policy::kSelfish, Policy::kSocial, Policy::kHiding, Policy::kCisp};
    c.replications = 50;
  } else if (name == "fig4a") {
    c = worst_case_base(name, kCloseMeans, 0.05);
  } else if (name == "fig4b") {
    c = worst_case_base(name, kSpreadMeans, 0.95);
  } else if (name == "worst_case_poa") {
    c = worst_case_base(name, kCloseMeans, 0.05);
    c.sweep_n = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  validate(c);
  return c;
}

std::vector<std::vector<double>> resolve_priors(const PriorSpec& spec, int n_players, std::size_t num_arms,
                                                std::uint64_t replication_seed) {
  const auto n = static_cast<std::size_t>(n_players);
  switch (spec.kind) {
    case PriorSpec::Kind::kUniform: return {n, std::vector<double>(num_arms, spec.value)};
    case PriorSpec::Kind::kRandom: return random_priors(n_players, num_arms, spec.seed.value_or(replication_seed));
    case PriorSpec::Kind::kPerArm: return {n, spec.values};
    case PriorSpec::Kind::kExplicit: return spec.matrix;
  }
  return {};
}

json belief_to_json(const BeliefState& b) {
  json j;
  j["owner"] = b.owner() ? json(*b.owner()) : json("planner");
  j["priors"] = b.priors();
  j["success_counts"] = b.success_counts();
  j["pull_counts"] = b.pull_counts();
  return j;
}

BeliefState belief_from_json(const json& j) {
  std::optional<PlayerIndex> owner;
  if (j.at("owner").is_number_unsigned()) owner = j.at("owner").get<PlayerIndex>();
  return BeliefState(field<std::vector<double>>(j, "priors", "priors"),
                     field<std::vector<std::int64_t>>(j, "success_counts", "success_counts"),
                     field<std::vector<std::int64_t>>(j, "pull_counts", "pull_counts"), owner);
}

namespace {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
}

Scenario make_scenario(const ExperimentConfig& c, Policy policy, int n, std::uint64_t seed) {
  Scenario s;
  s.policy = policy;
  s.true_means = c.true_means;
  s.min_gap = c.eta;
  s.n_players = n;
  s.horizon = c.horizon;
  s.rho = c.rho;
  s.priors = resolve_priors(c.priors, n, c.true_means.size(), seed);
  s.seed = seed;
  s.penalty = c.penalty;
  s.adversary = c.adversary;
  s.tracked_arm = c.tracked_arm;
  return s;
}

struct Replication {
  std::vector<MetricsRecord> metrics;
  std::optional<Round> convergence;
  double discounted_social = 0.0;
  double paired_social = 0.0;
  std::vector<double> payoff;
  int max_occupancy = 0;
  std::vector<std::vector<double>> tracked;
  Ledger ledger;
  std::vector<double> balances;
  std::vector<BeliefState> final_beliefs;
};

CellResult run_cell(const ExperimentConfig& c, Policy policy, int n) {
  const auto reps = static_cast<std::size_t>(c.replications);
  std::vector<Replication> out(reps);
  parallel_for(reps, [&](std::size_t i) {
    const std::uint64_t seed = c.base_seed + i;
    Trajectory traj = simulate(make_scenario(c, policy, n, seed));
    Replication& r = out[i];
    r.metrics = metrics_series(traj, c.rho, c.epsilon, c.window);
    r.convergence = r.metrics.empty() ? std::nullopt : r.metrics.back().convergence_round;
    r.discounted_social = discounted_sum(traj.social_reward, c.rho);
    r.paired_social = r.discounted_social;
    if (policy != Policy::kSocial) {
      const Trajectory social = simulate(make_scenario(c, Policy::kSocial, n, seed));
      r.paired_social = discounted_sum(social.social_reward, c.rho);
    }
    r.payoff = traj.discounted_payoff;
    r.max_occupancy = *std::max_element(traj.max_occupancy.begin(), traj.max_occupancy.end());
    r.tracked = std::move(traj.tracked_means);
    r.ledger = std::move(traj.ledger);
    r.balances = std::move(traj.balance_after_round);
    r.final_beliefs = std::move(traj.final_beliefs);
  });

  CellResult cell;
  cell.policy = policy;
  cell.n_players = n;
  const auto rounds = static_cast<std::size_t>(c.horizon);
  cell.tracked_mean.assign(static_cast<std::size_t>(n), std::vector<double>(rounds, 0.0));
  double pooled_opt = 0.0, pooled_test = 0.0;
  for (Replication& r : out) {
    cell.convergence.push_back(r.convergence);
    cell.discounted_social.push_back(r.discounted_social);
    cell.paired_social_discounted.push_back(r.paired_social);
    cell.inefficiency.push_back(r.discounted_social == 0.0 ? std::numeric_limits<double>::infinity()
                                                           : r.paired_social / r.discounted_social);
    pooled_opt += r.paired_social;
    pooled_test += r.discounted_social;
    cell.discounted_payoff.push_back(std::move(r.payoff));
    cell.max_occupancy.push_back(r.max_occupancy);
    for (std::size_t t = 0; t < rounds; ++t)
      for (std::size_t p = 0; p < cell.tracked_mean.size(); ++p)
        cell.tracked_mean[p][t] += r.tracked[t][p] / static_cast<double>(reps);
    if (policy == Policy::kCisp) {
      cell.ledgers.push_back(std::move(r.ledger));
      cell.balance_after_round.push_back(std::move(r.balances));
    }
    cell.metrics.push_back(std::move(r.metrics));
  }
  cell.inefficiency_pooled = pooled_test == 0.0 ? std::numeric_limits<double>::infinity() : pooled_opt / pooled_test;
  cell.first_final_beliefs = std::move(out.front().final_beliefs);
  return cell;
}

json finite_or_marker(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace

ExperimentResult run_experiment(ExperimentConfig config) {
  validate(config);
  ExperimentResult result;
  for (Policy policy : config.policies)
    for (int n : config.player_counts()) result.cells.push_back(run_cell(config, policy, n));
  result.config = std::move(config);
  return result;
}

json cell_summary(const ExperimentConfig& c, const CellResult& cell) {
  json j;
  j["policy"] = to_string(cell.policy);
  j["n_players"] = cell.n_players;
  j["replications"] = cell.metrics.size();

  const std::size_t rounds = cell.metrics.empty() ? 0 : cell.metrics.front().size();
  json per_round{{"t", json::array()},
                 {"learning_error_mean", json::array()},
                 {"learning_error_std", json::array()},
                 {"social_reward_mean", json::array()},
                 {"social_reward_std", json::array()},
                 {"discounted_cumulative_mean", json::array()},
                 {"discounted_cumulative_std", json::array()},
                 {"converged_fraction", json::array()}};
  std::vector<double> err(cell.metrics.size()), rew(cell.metrics.size()), cum(cell.metrics.size());
  for (std::size_t t = 0; t < rounds; ++t) {
    double converged = 0.0;
    for (std::size_t r = 0; r < cell.metrics.size(); ++r) {
      const MetricsRecord& m = cell.metrics[r][t];
      err[r] = m.learning_error;
      rew[r] = m.social_reward;
      cum[r] = m.discounted_cumulative;
      converged += m.converged ? 1.0 : 0.0;
    }
    per_round["t"].push_back(t + 1);
    const auto [em, es] = mean_std(err);
    const auto [rm, rs] = mean_std(rew);
    const auto [cm, cs] = mean_std(cum);
    per_round["learning_error_mean"].push_back(em);
    per_round["learning_error_std"].push_back(es);
    per_round["social_reward_mean"].push_back(rm);
    per_round["social_reward_std"].push_back(rs);
    per_round["discounted_cumulative_mean"].push_back(cm);
    per_round["discounted_cumulative_std"].push_back(cs);
    per_round["converged_fraction"].push_back(converged / static_cast<double>(cell.metrics.size()));
  }
  j["per_round"] = std::move(per_round);

  json conv = json::array();
  for (const auto& r : cell.convergence) conv.push_back(r ? json(*r) : json(nullptr));
  j["convergence_rounds"] = conv;

  json ir = json::array();
  for (double v : cell.inefficiency) ir.push_back(finite_or_marker(v));
  j["inefficiency_ratio"] = {{"per_replication", ir}, {"pooled", finite_or_marker(cell.inefficiency_pooled)}};
  j["discounted_social_reward"] = cell.discounted_social;
  j["paired_social_discounted_reward"] = cell.paired_social_discounted;

  std::vector<double> sorted = c.true_means;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  j["poa_bound"] = poa_bound(sorted, cell.n_players);
  j["tail_bound"] = std::pow(c.rho, static_cast<double>(c.horizon)) / (1.0 - c.rho);

  std::vector<double> payoff_mean(static_cast<std::size_t>(cell.n_players), 0.0);
  for (const auto& rep : cell.discounted_payoff)
    for (std::size_t p = 0; p < rep.size(); ++p) payoff_mean[p] += rep[p] / static_cast<double>(cell.metrics.size());
  j["discounted_payoff_mean"] = payoff_mean;
  j["max_occupancy"] = cell.max_occupancy;

  if (cell.policy == Policy::kCisp) {
    double min_balance = 0.0;
    std::vector<double> finals;
    for (const auto& balances : cell.balance_after_round) {
      for (double b : balances) min_balance = std::min(min_balance, b);
      finals.push_back(balances.empty() ? 0.0 : balances.back());
    }
    j["ledger"] = {{"min_balance", min_balance}, {"final_balances", finals}};
  }

  j["belief_trajectories"] = {{"arm", c.tracked_arm}, {"mean_by_player", cell.tracked_mean}};
  json beliefs = json::array();
  for (const auto& b : cell.first_final_beliefs) beliefs.push_back(belief_to_json(b));
  j["final_beliefs_replication_0"] = beliefs;
  return j;
}

json experiment_summary(const ExperimentResult& result) {
  json j;
  j["config"] = config_to_json(result.config);
  json cells = json::array();
  for (const auto& cell : result.cells) cells.push_back(cell_summary(result.config, cell));
  j["cells"] = cells;
  return j;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_cell(const ExperimentConfig& c, const CellResult& cell, const std::filesystem::path& dir,
                bool with_summary) {
  std::string csv = std::string(metrics_csv_header()) + "\n";
  for (std::size_t r = 0; r < cell.metrics.size(); ++r)
    for (const auto& m : cell.metrics[r]) csv += metrics_csv_row(r, m) + "\n";
  write_file(dir / "metrics.csv", csv);

  if (cell.policy == Policy::kCisp) {
    std::string ledger = "replication,round,player,kind,amount,running_balance\n";
    for (std::size_t r = 0; r < cell.ledgers.size(); ++r) {
      const std::string body = cell.ledgers[r].to_csv();
      std::size_t pos = body.find('\n') + 1;
      while (pos < body.size()) {
        const std::size_t end = body.find('\n', pos);
        ledger += std::to_string(r) + "," + body.substr(pos, end - pos) + "\n";
        pos = end + 1;
      }
    }
    write_file(dir / "ledger.csv", ledger);
  }
  if (with_summary) {
    json j{{"config", config_to_json(c)}, {"cell", cell_summary(c, cell)}};
    write_file(dir / "summary.json", j.dump(2) + "\n");
  }
}

}  // namespace

void emit_results(const ExperimentResult& result, const std::filesystem::path& output_dir) {
  if (output_dir.empty()) throw ConfigError("out", "output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + output_dir.string() + ": " + ec.message());

  if (result.cells.size() == 1) {
    write_cell(result.config, result.cells.front(), output_dir, false);
  } else {
    for (const auto& cell : result.cells) {
      const auto dir = output_dir / (std::string(to_string(cell.policy)) + "_n" + std::to_string(cell.n_players));
      std::filesystem::create_directories(dir, ec);
      if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
      write_cell(result.config, cell, dir, true);
    }
  }
  write_file(output_dir / "summary.json", experiment_summary(result).dump(2) + "\n");
}

}  // namespace cmab
