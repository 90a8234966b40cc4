#include "cmab/cisp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cmab/rng.hpp"
#include "cmab/selfish_policy.hpp"
#include "cmab/social_policy.hpp"

namespace cmab {

const char* to_string(LedgerEntry::Kind kind) {
  switch (kind) {
    case LedgerEntry::Kind::kCharge: return "charge";
    case LedgerEntry::Kind::kReward: return "reward";
    case LedgerEntry::Kind::kPenalty: return "penalty";
    case LedgerEntry::Kind::kCompensation: return "compensation";
  }
  return "unknown";
}

namespace {

double signed_amount(const LedgerEntry& e) {
  const bool income = e.kind == LedgerEntry::Kind::kCharge || e.kind == LedgerEntry::Kind::kPenalty;
  return income ? e.amount : -e.amount;
}

}  // namespace

void Ledger::append(const LedgerEntry& entry) {
  if (!(entry.amount >= 0.0)) throw ConfigError("amount", "ledger amounts must be non-negative");
  entries_.push_back(entry);
  balance_ += signed_amount(entry);
  balances_.push_back(balance_);
}

double Ledger::recompute_balance() const {
  double total = 0.0;
  for (const auto& e : entries_) total += signed_amount(e);
  return total;
}

std::string Ledger::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "round,player,kind,amount,running_balance\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    os << e.round << ',' << e.player << ',' << to_string(e.kind) << ',' << e.amount << ',' << balances_[i] << '\n';
  }
  return os.str();
}

AggregateView step1_aggregate(std::span<const Report> reports, std::size_t num_arms) {
  if (reports.empty()) throw ConfigError("reports", "at least one report is required");
  AggregateView view;
  view.intent_occupancy.assign(num_arms, 0);
  view.flagged.assign(reports.size(), false);
  std::vector<BeliefState> valid;
  for (std::size_t p = 0; p < reports.size(); ++p) {
    const Report& r = reports[p];
    if (r.belief.num_arms() != num_arms || r.intent >= num_arms) {
      view.flagged[p] = true;
      continue;
    }
    valid.push_back(r.belief);
    ++view.intent_occupancy[r.intent];
  }
  if (valid.empty()) {
    view.planner = BeliefState(std::vector<double>(num_arms, 0.5), std::nullopt);
  } else {
    view.planner = aggregate_planner_belief(valid);
  }
  return view;
}

namespace {

std::vector<bool> membership(std::span<const ArmIndex> arms, std::size_t num_arms) {
  std::vector<bool> in(num_arms, false);
  for (ArmIndex a : arms) {
    if (a >= num_arms) throw ConfigError("optimal_set", "arm index out of range");
    in[a] = true;
  }
  return in;
}

}  // namespace

std::vector<std::optional<ArmIndex>> step2_informational(std::span<const Report> reports, const AggregateView& agg,
                                                         std::span<const ArmIndex> optimal_set, double rho) {
  const std::size_t k_arms = agg.intent_occupancy.size();
  const std::vector<bool> optimal = membership(optimal_set, k_arms);
  const std::vector<double> means = agg.planner.means();
  const auto& pulls = agg.planner.pull_counts();

  std::vector<bool> filled(k_arms, false);
  for (ArmIndex a = 0; a < k_arms; ++a) filled[a] = agg.intent_occupancy[a] > 0;

  std::vector<std::optional<ArmIndex>> recs(reports.size());
  for (PlayerIndex p = 0; p < reports.size(); ++p) {
    if (agg.flagged[p]) continue;
    const ArmIndex from = reports[p].intent;
    if (optimal[from]) continue;
    const double stay = expected_reward(means[from], agg.intent_occupancy[from], true);
    std::optional<ArmIndex> best;
    for (ArmIndex k : optimal_set) {
      if (filled[k]) continue;
      const ThresholdInputs in{from, k, stay, pulls[from], pulls[k], 0.0, rho};
      if (!(means[k] > switch_threshold(in))) continue;
      if (!best || means[k] > means[*best] || (means[k] == means[*best] && k < *best)) best = k;
    }
    if (best) {
      recs[p] = *best;
      filled[*best] = true;
    }
  }
  return recs;
}

RoundPlan step3_payments(std::span<const Report> reports, const AggregateView& agg,
                         std::span<const ArmIndex> optimal_set,
                         std::span<const std::optional<ArmIndex>> step2_recommendations, double unfunded_budget) {
  const std::size_t n = reports.size();
  const std::size_t k_arms = agg.intent_occupancy.size();
  if (step2_recommendations.size() != n) throw ConfigError("step2_recommendations", "one entry per player");
  if (optimal_set.size() != n) throw ConfigError("optimal_set", "must contain exactly one arm per player");
  const std::vector<bool> optimal = membership(optimal_set, k_arms);

  RoundPlan plan;
  plan.optimal_set.assign(optimal_set.begin(), optimal_set.end());
  std::sort(plan.optimal_set.begin(), plan.optimal_set.end());
  plan.charges.assign(n, 0.0);
  plan.rewards.assign(n, 0.0);
  plan.raw_rewards.assign(n, std::numeric_limits<double>::quiet_NaN());
  plan.source_arm.assign(n, std::nullopt);
  plan.announced_tolls.assign(k_arms, 0.0);
  plan.intent_occupancy = agg.intent_occupancy;

  std::vector<std::optional<ArmIndex>> rec(step2_recommendations.begin(), step2_recommendations.end());
  std::vector<bool> filled(k_arms, false);
  for (ArmIndex a = 0; a < k_arms; ++a) filled[a] = agg.intent_occupancy[a] > 0;
  for (const auto& r : rec)
    if (r) filled[*r] = true;

  auto reported = [&](PlayerIndex p, ArmIndex a) { return reports[p].belief.empirical_mean(a); };

  // Highest-belief chooser of each intent arm; ties go to the lowest index.
  std::vector<std::optional<PlayerIndex>> top_chooser(k_arms);
  for (PlayerIndex p = 0; p < n; ++p) {
    if (agg.flagged[p]) continue;
    const ArmIndex a = reports[p].intent;
    if (!top_chooser[a] || reported(p, a) > reported(*top_chooser[a], a)) top_chooser[a] = p;
  }

  for (ArmIndex i : plan.optimal_set) {
    const int m = agg.intent_occupancy[i];
    if (m == 0) continue;
    const PlayerIndex stayer = *top_chooser[i];
    rec[stayer] = i;
    if (m > 1) {
      const double toll = (static_cast<double>(m - 1) / m) * reported(stayer, i);
      plan.charges[stayer] = toll;
      plan.announced_tolls[i] = toll;
    }
  }

  // Movers off crowded optimal arms are matched first; deferred and flagged
  // players take whatever remains.
  std::vector<PlayerIndex> crowded, deferred;
  for (PlayerIndex p = 0; p < n; ++p) {
    if (rec[p]) continue;
    const bool from_crowded = !agg.flagged[p] && optimal[reports[p].intent];
    (from_crowded ? crowded : deferred).push_back(p);
  }

  auto move_cost = [&](PlayerIndex p, ArmIndex j) {
    const ArmIndex src = reports[p].intent;
    return reported(p, src) / agg.intent_occupancy[src] - reported(p, j);
  };

  double budget = std::max(unfunded_budget, 0.0);
  for (ArmIndex j : plan.optimal_set) {
    if (filled[j]) continue;
    std::vector<PlayerIndex>& pool = !crowded.empty() ? crowded : deferred;
    if (pool.empty()) throw ConfigError("optimal_set", "more empty optimal arms than unassigned players");
    const bool funded = &pool == &crowded;
    auto pick = pool.end();
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      if (agg.flagged[*it]) continue;
      if (pick == pool.end() || move_cost(*it, j) < move_cost(*pick, j)) pick = it;
    }
    if (pick == pool.end()) pick = pool.begin();
    const PlayerIndex l = *pick;
    pool.erase(pick);
    rec[l] = j;
    filled[j] = true;
    if (agg.flagged[l]) continue;

    const ArmIndex src = reports[l].intent;
    const PlayerIndex top = *top_chooser[src];
    const double raw = reported(top, src) / agg.intent_occupancy[src] - reported(l, j);
    plan.raw_rewards[l] = raw;
    plan.source_arm[l] = src;
    double paid = std::max(raw, 0.0);
    if (!funded) {
      paid = std::min(paid, budget);
      budget -= paid;
    }
    plan.rewards[l] = paid;
  }

  plan.recommendations.resize(n);
  for (PlayerIndex p = 0; p < n; ++p) plan.recommendations[p] = *rec[p];
  return plan;
}

std::vector<LedgerEntry> settle_payments(Round round, const RoundPlan& plan, std::span<const ArmIndex> final_actions) {
  std::vector<LedgerEntry> out;
  for (PlayerIndex p = 0; p < plan.charges.size(); ++p)
    if (plan.charges[p] > 0.0) out.push_back({round, p, LedgerEntry::Kind::kCharge, plan.charges[p]});
  for (PlayerIndex p = 0; p < plan.rewards.size(); ++p)
    if (plan.rewards[p] > 0.0 && final_actions[p] == plan.recommendations[p])
      out.push_back({round, p, LedgerEntry::Kind::kReward, plan.rewards[p]});
  return out;
}

std::vector<LedgerEntry> step4_verify(Round round, std::span<const ArmIndex> final_actions, const RoundPlan& plan,
                                      std::span<const Report> reports, double penalty) {
  const std::size_t n = plan.recommendations.size();
  if (final_actions.size() != n) throw ConfigError("final_actions", "one action per player");
  std::vector<LedgerEntry> income, outgo;
  std::vector<bool> compensated(n, false);
  for (PlayerIndex d = 0; d < n; ++d) {
    const ArmIndex arm = final_actions[d];
    if (arm == plan.recommendations[d]) continue;
    income.push_back({round, d, LedgerEntry::Kind::kPenalty, penalty});
    if (plan.source_arm[d] && *plan.source_arm[d] == arm && plan.announced_tolls[arm] > 0.0)
      income.push_back({round, d, LedgerEntry::Kind::kCharge, plan.announced_tolls[arm]});
    for (PlayerIndex l = 0; l < n; ++l) {
      if (l == d || compensated[l]) continue;
      if (plan.recommendations[l] != arm || final_actions[l] != arm) continue;
      const double loss = reports[l].belief.num_arms() > arm ? reports[l].belief.empirical_mean(arm) : 0.0;
      const double amount = std::min(penalty, loss);
      compensated[l] = true;
      if (amount > 0.0) outgo.push_back({round, l, LedgerEntry::Kind::kCompensation, amount});
      break;
    }
  }
  income.insert(income.end(), outgo.begin(), outgo.end());
  return income;
}

BeliefState distort_report(const BeliefState& belief, double bias) {
  if (!(bias >= 0.0)) throw ConfigError("report_bias", "must be non-negative");
  if (bias == 1.0) return belief;
  std::vector<double> priors = belief.priors();
  for (double& p : priors) p = std::clamp(p * bias, 0.0, 1.0);
  std::vector<std::int64_t> successes = belief.success_counts();
  const auto& pulls = belief.pull_counts();
  for (std::size_t k = 0; k < successes.size(); ++k) {
    const auto scaled = static_cast<std::int64_t>(std::llround(static_cast<double>(successes[k]) * bias));
    successes[k] = std::clamp<std::int64_t>(scaled, 0, pulls[k]);
  }
  return BeliefState(std::move(priors), std::move(successes), pulls, belief.owner());
}

CispMechanism::CispMechanism(int n_players, double rho, double penalty, std::optional<AdversaryConfig> adversary,
                             std::uint64_t seed)
    : n_players_(n_players), rho_(rho), penalty_(penalty), adversary_(adversary), seed_(seed) {
  if (n_players_ < 1) throw ConfigError("n_players", "need at least one player");
  if (!(penalty_ >= 0.0)) throw ConfigError("penalty", "must be non-negative");
  if (adversary_) {
    if (adversary_->player >= static_cast<PlayerIndex>(n_players_))
      throw ConfigError("adversary.player", "no such player");
    if (!(adversary_->deviation_probability >= 0.0 && adversary_->deviation_probability <= 1.0))
      throw ConfigError("adversary.deviation_probability", "must lie in [0,1]");
  }
}

Report CispMechanism::make_report(const CispPlayer& player, PlayerIndex index, ArmIndex intent) const {
  if (adversary_ && adversary_->player == index) return {distort_report(player.belief, adversary_->report_bias), intent};
  return {player.belief, intent};
}

BeliefState CispMechanism::current_planner_belief(std::span<const CispPlayer> players) const {
  std::vector<BeliefState> beliefs;
  beliefs.reserve(players.size());
  for (PlayerIndex p = 0; p < players.size(); ++p) beliefs.push_back(make_report(players[p], p, 0).belief);
  return aggregate_planner_belief(beliefs);
}

CispMechanism::RoundResult CispMechanism::run_round(std::vector<CispPlayer>& players, ArmEnvironment& env) {
  if (players.size() != static_cast<std::size_t>(n_players_))
    throw ConfigError("players", "player count does not match the mechanism");
  const std::size_t k_arms = env.num_arms();
  const Round round = env.current_round() + 1;
  const std::size_t n = players.size();

  RoundResult result;
  result.intents.resize(n);
  std::vector<Report> reports;
  reports.reserve(n);
  for (PlayerIndex p = 0; p < n; ++p) {
    const CispPlayer& pl = players[p];
    result.intents[p] = pl.last_arm ? decide(pl.belief, *pl.last_arm, rho_, n_players_)
                                    : init_decide(pl.belief, rho_, n_players_);
    reports.push_back(make_report(pl, p, result.intents[p]));
  }

  const AggregateView agg = step1_aggregate(reports, k_arms);
  result.planner_belief = agg.planner;
  const OptimalArmSet optimal = select_arm_set(agg.planner, n_players_, rho_);
  const auto step2 = step2_informational(reports, agg, optimal.arms, rho_);
  result.plan = step3_payments(reports, agg, optimal.arms, step2, ledger_.running_balance());

  std::vector<ArmIndex> actions = result.plan.recommendations;
  if (adversary_ && adversary_->deviation_probability > 0.0) {
    const PlayerIndex a = adversary_->player;
    CounterRng coin(seed_, Stream::kPolicy, static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(a));
    if (coin.uniform01() < adversary_->deviation_probability) {
      if (result.intents[a] != actions[a]) {
        actions[a] = result.intents[a];
      } else {
        const std::vector<double> own = players[a].belief.means();
        std::optional<ArmIndex> alt;
        for (ArmIndex k = 0; k < k_arms; ++k)
          if (k != actions[a] && (!alt || own[k] > own[*alt])) alt = k;
        if (alt) actions[a] = *alt;
      }
    }
  }

  result.outcome = env.resolve(actions);
  result.net_payoff.assign(n, 0.0);
  for (PlayerIndex p = 0; p < n; ++p) result.net_payoff[p] = result.outcome.realized_rewards[p];

  auto post = [&](const std::vector<LedgerEntry>& entries) {
    for (const auto& e : entries) {
      ledger_.append(e);
      result.net_payoff[e.player] += e.kind == LedgerEntry::Kind::kCharge || e.kind == LedgerEntry::Kind::kPenalty
                                         ? -e.amount
                                         : e.amount;
    }
  };
  // Income is booked before outgo so the balance never dips mid-round.
  const auto settled = settle_payments(round, result.plan, actions);
  const auto verified = step4_verify(round, actions, result.plan, reports, penalty_);
  std::vector<LedgerEntry> ordered;
  for (const auto* batch : {&settled, &verified})
    for (const auto& e : *batch)
      if (signed_amount(e) >= 0.0) ordered.push_back(e);
  for (const auto* batch : {&settled, &verified})
    for (const auto& e : *batch)
      if (signed_amount(e) < 0.0) ordered.push_back(e);
  post(ordered);

  for (PlayerIndex p = 0; p < n; ++p) {
    const ArmIndex arm = result.outcome.choices[p];
    const Observation obs = result.outcome.collision_flags[p] ? Observation::collided()
                                                              : Observation::pulled(result.outcome.realized_rewards[p]);
    players[p].belief.record(arm, obs);
    players[p].last_arm = arm;
  }
  return result;
}

CispMechanism::RoundResult run_cisp_round(std::vector<CispPlayer>& players, ArmEnvironment& env,
                                          CispMechanism& mechanism) {
  return mechanism.run_round(players, env);
}

}  // namespace cmab
