#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmab/beliefs.hpp"
#include "cmab/environment.hpp"
#include "cmab/types.hpp"

namespace cmab {

struct LedgerEntry {
  enum class Kind { kCharge, kReward, kPenalty, kCompensation };
  Round round = 0;
  PlayerIndex player = 0;
  Kind kind = Kind::kCharge;
  double amount = 0.0;  // always >= 0; the kind carries the sign
};

const char* to_string(LedgerEntry::Kind kind);

/// Planner-side money flow. Charges and penalties are income, rewards and
/// compensations are outgo; the balance is recomputable from the entries.
class Ledger {
 public:
  void append(const LedgerEntry& entry);
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  /// Balance after each entry, parallel to entries().
  const std::vector<double>& balances() const noexcept { return balances_; }
  double running_balance() const noexcept { return balance_; }
  /// Sum over entries with signs applied, independent of the cached balance.
  double recompute_balance() const;
  /// CSV with header round,player,kind,amount,running_balance.
  std::string to_csv() const;

 private:
  std::vector<LedgerEntry> entries_;
  std::vector<double> balances_;
  double balance_ = 0.0;
};

/// What a player tells the planner in step 1: its (possibly distorted) belief
/// and the arm its own selfish policy would pick.
struct Report {
  BeliefState belief;
  ArmIndex intent = 0;
};

struct AggregateView {
  BeliefState planner;
  std::vector<int> intent_occupancy;
  std::vector<bool> flagged;  // malformed reports, excluded from aggregation
};

/// Step 1: pool the well-formed reports and count selfish intents per arm.
AggregateView step1_aggregate(std::span<const Report> reports, std::size_t num_arms);

/// Step 2: every player whose intent lies outside the optimal set is pointed,
/// in player order, at the best still-empty optimal arm whose planner mean beats
/// that player's selfish switching threshold evaluated under the planner
/// belief. Players without such an arm stay unassigned (deferred to step 3).
std::vector<std::optional<ArmIndex>> step2_informational(std::span<const Report> reports, const AggregateView& agg,
                                                         std::span<const ArmIndex> optimal_set, double rho);

struct RoundPlan {
  std::vector<ArmIndex> optimal_set;
  std::vector<ArmIndex> recommendations;  // per player, a bijection onto optimal_set
  std::vector<double> charges;            // per player, levied on the recommended stayer of a crowded arm
  std::vector<double> rewards;            // per player, paid only if the player complies
  std::vector<double> raw_rewards;        // unfloored, uncapped reward formula; NaN for non-movers
  std::vector<std::optional<ArmIndex>> source_arm;  // movers: the arm they were moved away from
  std::vector<double> announced_tolls;    // per arm; charged to a mover that sticks to it anyway
  std::vector<int> intent_occupancy;
};

/// Step 3: side payments. On every crowded optimal arm the highest-belief
/// chooser stays and pays ((m-1)/m) * mu; every empty optimal arm is filled by
/// the remaining player with the smallest (mu_src/m - mu_j) and that player is
/// promised mu_src^stayer/m - mu_j (floored at 0). Players deferred from step 2
/// fill whatever is left; their rewards have no matching charge and are capped
/// by `unfunded_budget`.
RoundPlan step3_payments(std::span<const Report> reports, const AggregateView& agg,
                         std::span<const ArmIndex> optimal_set,
                         std::span<const std::optional<ArmIndex>> step2_recommendations, double unfunded_budget);

/// Charges and promised rewards that settle once final actions are known.
std::vector<LedgerEntry> settle_payments(Round round, const RoundPlan& plan, std::span<const ArmIndex> final_actions);

/// Step 4: every deviator pays `penalty` (plus the toll it was warned about);
/// the compliant player whose recommended arm it invaded is compensated
/// min(penalty, that player's reported mean of the arm), once per round.
std::vector<LedgerEntry> step4_verify(Round round, std::span<const ArmIndex> final_actions, const RoundPlan& plan,
                                      std::span<const Report> reports, double penalty);

/// A penalty at or below the maximum per-round reward cannot deter deviation.
inline bool penalty_deters(double penalty) { return penalty > 1.0; }

/// Misbehaviour of a single player: scaled reports and ignored recommendations.
struct AdversaryConfig {
  PlayerIndex player = 0;
  double report_bias = 1.0;
  double deviation_probability = 0.0;
};

/// Applies a multiplicative bias to every reported mean, keeping integer counts.
BeliefState distort_report(const BeliefState& belief, double bias);

struct CispPlayer {
  BeliefState belief;
  std::optional<ArmIndex> last_arm;
};

/// Coordinator state for one replication: ledger plus the configuration of
/// the planner. Not thread-safe; one instance per simulation loop.
class CispMechanism {
 public:
  CispMechanism(int n_players, double rho, double penalty, std::optional<AdversaryConfig> adversary,
                std::uint64_t seed);

  struct RoundResult {
    RoundPlan plan;
    RoundOutcome outcome;
    std::vector<ArmIndex> intents;
    std::vector<double> net_payoff;  // realized reward plus transfers, per player
    BeliefState planner_belief;      // aggregate of reports at decision time
  };

  RoundResult run_round(std::vector<CispPlayer>& players, ArmEnvironment& env);

  const Ledger& ledger() const noexcept { return ledger_; }
  /// Planner belief the mechanism would aggregate from the players' current state.
  BeliefState current_planner_belief(std::span<const CispPlayer> players) const;

 private:
  Report make_report(const CispPlayer& player, PlayerIndex index, ArmIndex intent) const;

  int n_players_;
  double rho_;
  double penalty_;
  std::optional<AdversaryConfig> adversary_;
  std::uint64_t seed_;
  Ledger ledger_;
};

CispMechanism::RoundResult run_cisp_round(std::vector<CispPlayer>& players, ArmEnvironment& env,
                                          CispMechanism& mechanism);

}  // namespace cmab
