#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmab/cisp.hpp"
#include "cmab/social_policy.hpp"

using namespace cmab;

namespace {

Report honest(std::vector<double> means, ArmIndex intent, PlayerIndex owner) {
  // Ten pulls per arm pin the empirical mean to the requested value.
  std::vector<std::int64_t> s, c;
  for (double m : means) {
    s.push_back(std::llround(m * 10));
    c.push_back(10);
  }
  return {BeliefState(means, s, c, owner), intent};
}

}  // namespace

TEST_CASE("ledger keeps a recomputable running balance") {
  Ledger ledger;
  ledger.append({1, 0, LedgerEntry::Kind::kCharge, 0.5});
  ledger.append({1, 1, LedgerEntry::Kind::kReward, 0.25});
  ledger.append({2, 2, LedgerEntry::Kind::kPenalty, 10.0});
  ledger.append({2, 1, LedgerEntry::Kind::kCompensation, 0.75});
  CHECK(ledger.running_balance() == doctest::Approx(9.5));
  CHECK(ledger.recompute_balance() == doctest::Approx(ledger.running_balance()));
  CHECK(ledger.balances().size() == 4);
  CHECK_THROWS_AS(ledger.append({3, 0, LedgerEntry::Kind::kCharge, -1.0}), ConfigError);

  const std::string csv = ledger.to_csv();
  CHECK(csv.rfind("round,player,kind,amount,running_balance\n", 0) == 0);
  CHECK(csv.find("2,2,penalty,10,10.25\n") != std::string::npos);
}

TEST_CASE("step 1 pools well-formed reports and flags malformed ones") {
  std::vector<Report> reports{honest({0.8, 0.4, 0.2}, 0, 0), honest({0.6, 0.4, 0.2}, 0, 1),
                              {BeliefState({0.5, 0.5}, 2), 1}};
  const AggregateView agg = step1_aggregate(reports, 3);
  CHECK(agg.flagged == std::vector<bool>{false, false, true});
  CHECK(agg.intent_occupancy == std::vector<int>{2, 0, 0});
  CHECK(agg.planner.empirical_mean(0) == doctest::Approx(0.7));

  const std::vector<Report> solo{honest({0.3, 0.9}, 1, 0)};
  CHECK(step1_aggregate(solo, 2).planner.means() == solo[0].belief.means());
}

TEST_CASE("a distorted report feeds the aggregate") {
  const Report truth = honest({0.4, 0.2}, 0, 0);
  const BeliefState inflated = distort_report(truth.belief, 2.0);
  CHECK(inflated.empirical_mean(0) == doctest::Approx(0.8));
  CHECK(inflated.pull_counts() == truth.belief.pull_counts());
  const std::vector<Report> reports{{inflated, 0}};
  CHECK(step1_aggregate(reports, 2).planner.empirical_mean(0) == doctest::Approx(0.8));
  CHECK(distort_report(truth.belief, 5.0).empirical_mean(0) == 1.0);
  CHECK_THROWS_AS(distort_report(truth.belief, -1.0), ConfigError);
}

TEST_CASE("step 2 points outside players at distinct empty optimal arms") {
  std::vector<Report> reports{honest({0.9, 0.8, 0.7, 0.1}, 3, 0), honest({0.9, 0.8, 0.7, 0.1}, 3, 1),
                              honest({0.9, 0.8, 0.7, 0.1}, 0, 2)};
  const AggregateView agg = step1_aggregate(reports, 4);
  const std::vector<ArmIndex> optimal{0, 1, 2};
  const auto recs = step2_informational(reports, agg, optimal, 0.5);
  REQUIRE(recs[0].has_value());
  REQUIRE(recs[1].has_value());
  CHECK(*recs[0] == 1);
  CHECK(*recs[1] == 2);
  CHECK_FALSE(recs[2].has_value());

  std::vector<Report> inside{honest({0.9, 0.8, 0.1}, 0, 0), honest({0.9, 0.8, 0.1}, 1, 1)};
  const auto none = step2_informational(inside, step1_aggregate(inside, 3), std::vector<ArmIndex>{0, 1}, 0.5);
  CHECK_FALSE(none[0].has_value());
  CHECK_FALSE(none[1].has_value());
}

TEST_CASE("step 3 charges the stayer and rewards the mover") {
  // Three players crowd arm 0; the highest believer stays.
  std::vector<Report> reports{honest({0.6, 0.1, 0.2, 0.1}, 0, 0), honest({0.9, 0.2, 0.2, 0.1}, 0, 1),
                              honest({0.9, 0.3, 0.2, 0.1}, 0, 2)};
  const AggregateView agg = step1_aggregate(reports, 4);
  const std::vector<ArmIndex> optimal{0, 1, 2};
  const auto step2 = step2_informational(reports, agg, optimal, 0.9);
  const RoundPlan plan = step3_payments(reports, agg, optimal, step2, 0.0);

  CHECK(plan.recommendations[1] == 0);
  CHECK(plan.charges[1] == doctest::Approx(0.6));
  CHECK(plan.announced_tolls[0] == doctest::Approx(0.6));
  // Arm 1 goes to the cheaper mover (player 2: 0.3 - 0.3 = 0 beats 0.2 - 0.1), arm 2 to player 0.
  CHECK(plan.recommendations[2] == 1);
  CHECK(plan.recommendations[0] == 2);
  CHECK(plan.raw_rewards[2] == doctest::Approx(0.0));
  CHECK(plan.rewards[0] == doctest::Approx(0.9 / 3 - 0.2));
  CHECK(plan.source_arm[0] == 0);
}

TEST_CASE("step 3 with two choosers charges half the belief") {
  std::vector<Report> reports{honest({0.8, 0.3, 0.1}, 0, 0), honest({0.8, 0.3, 0.1}, 0, 1)};
  const AggregateView agg = step1_aggregate(reports, 3);
  const std::vector<ArmIndex> optimal{0, 1};
  const RoundPlan plan =
      step3_payments(reports, agg, optimal, step2_informational(reports, agg, optimal, 0.9), 0.0);
  CHECK(plan.charges[0] == doctest::Approx(0.4));
  CHECK(plan.recommendations == std::vector<ArmIndex>{0, 1});
  CHECK(plan.rewards[1] == doctest::Approx(0.1));
}

TEST_CASE("collision-free intents need no payments") {
  std::vector<Report> reports{honest({0.8, 0.3, 0.1}, 0, 0), honest({0.8, 0.3, 0.1}, 1, 1)};
  const AggregateView agg = step1_aggregate(reports, 3);
  const std::vector<ArmIndex> optimal{0, 1};
  const RoundPlan plan =
      step3_payments(reports, agg, optimal, step2_informational(reports, agg, optimal, 0.9), 0.0);
  CHECK(plan.recommendations == std::vector<ArmIndex>{0, 1});
  CHECK(plan.charges == std::vector<double>{0.0, 0.0});
  CHECK(plan.rewards == std::vector<double>{0.0, 0.0});
  CHECK(std::isnan(plan.raw_rewards[0]));
}

TEST_CASE("step 4 penalizes deviators and compensates the invaded player once") {
  std::vector<Report> reports{honest({0.8, 0.3, 0.1}, 0, 0), honest({0.8, 0.3, 0.1}, 1, 1)};
  const AggregateView agg = step1_aggregate(reports, 3);
  const std::vector<ArmIndex> optimal{0, 1};
  const RoundPlan plan =
      step3_payments(reports, agg, optimal, step2_informational(reports, agg, optimal, 0.9), 0.0);

  CHECK(step4_verify(1, plan.recommendations, plan, reports, 10.0).empty());

  const auto invaded = step4_verify(1, std::vector<ArmIndex>{0, 0}, plan, reports, 10.0);
  REQUIRE(invaded.size() == 2);
  CHECK(invaded[0].kind == LedgerEntry::Kind::kPenalty);
  CHECK(invaded[0].player == 1);
  CHECK(invaded[1].kind == LedgerEntry::Kind::kCompensation);
  CHECK(invaded[1].player == 0);
  CHECK(invaded[1].amount == doctest::Approx(0.8));

  const auto outside = step4_verify(1, std::vector<ArmIndex>{0, 2}, plan, reports, 10.0);
  REQUIRE(outside.size() == 1);
  CHECK(outside[0].amount == 10.0);
}

TEST_CASE("penalty deterrence needs more than one unit of reward") {
  CHECK(penalty_deters(10.0));
  CHECK_FALSE(penalty_deters(1.0));
}

TEST_CASE("worst-case priors: the first mechanism round is collision-free") {
  for (int n : {2, 5, 9}) {
    std::vector<double> theta(10, 0.05), mu(10);
    theta[0] = 0.99;
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = 0.95 - 0.05 * double(k);
    ArmEnvironment env(mu, 0.01, 4);
    std::vector<CispPlayer> players;
    for (int p = 0; p < n; ++p) players.push_back({BeliefState(theta, PlayerIndex(p)), std::nullopt});
    CispMechanism mech(n, 0.05, 10.0, std::nullopt, 4);
    const auto r = run_cisp_round(players, env, mech);
    CHECK(*std::max_element(r.outcome.occupancy.begin(), r.outcome.occupancy.end()) == 1);
    CHECK(mech.ledger().running_balance() >= 0.0);
  }
}

TEST_CASE("single player: the mechanism only recommends") {
  ArmEnvironment env({0.3, 0.8, 0.5}, 0.01, 2);
  std::vector<CispPlayer> players{{BeliefState({0.5, 0.5, 0.5}, 0), std::nullopt}};
  CispMechanism mech(1, 0.9, 10.0, std::nullopt, 2);
  for (int t = 0; t < 40; ++t) {
    const auto r = mech.run_round(players, env);
    CHECK(r.outcome.choices[0] == r.plan.recommendations[0]);
  }
  CHECK(mech.ledger().entries().empty());
}

TEST_CASE("mechanism rejects inconsistent configuration") {
  CHECK_THROWS_AS(CispMechanism(0, 0.9, 10.0, std::nullopt, 1), ConfigError);
  CHECK_THROWS_AS(CispMechanism(2, 0.9, -1.0, std::nullopt, 1), ConfigError);
  CHECK_THROWS_AS(CispMechanism(2, 0.9, 10.0, AdversaryConfig{2, 1.0, 0.0}, 1), ConfigError);
  CHECK_THROWS_AS(CispMechanism(2, 0.9, 10.0, AdversaryConfig{0, 1.0, 1.5}, 1), ConfigError);
}

TEST_CASE("recommendations stay a bijection and the budget never dips under adversaries") {
  const std::vector<double> mu{0.22, 0.12, 0.98, 0.11, 0.09, 0.08, 0.14, 0.11, 0.09};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ArmEnvironment env(mu, 0.01, seed);
    std::vector<CispPlayer> players;
    for (int p = 0; p < 5; ++p) players.push_back({BeliefState(std::vector<double>(9, 0.5), PlayerIndex(p)), {}});
    CispMechanism mech(5, 0.95, 10.0, AdversaryConfig{1, 1.5, 0.3}, seed);
    for (int t = 0; t < 200; ++t) {
      const auto r = mech.run_round(players, env);
      std::vector<ArmIndex> recs = r.plan.recommendations;
      std::sort(recs.begin(), recs.end());
      CHECK(recs == r.plan.optimal_set);
      CHECK(mech.ledger().running_balance() >= 0.0);
    }
    for (double b : mech.ledger().balances()) CHECK(b >= 0.0);
    CHECK(mech.ledger().recompute_balance() == doctest::Approx(mech.ledger().running_balance()));
  }
}
