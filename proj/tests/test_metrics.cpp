#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cmab/metrics.hpp"

using namespace cmab;

namespace {

// Written independently of the library: explicit loop over squared offsets.
double reference_error(const std::vector<std::vector<double>>& beliefs, const std::vector<double>& mu) {
  long double total = 0;
  for (const auto& b : beliefs) {
    long double ss = 0;
    for (std::size_t k = 0; k < mu.size(); ++k) ss += (long double)(mu[k] - b[k]) * (mu[k] - b[k]);
    total += std::sqrt(ss);
  }
  return double(total / (beliefs.size() * mu.size()));
}

BeliefState at_means(const std::vector<double>& m) { return BeliefState(m, std::nullopt); }

}  // namespace

TEST_CASE("learning error examples") {
  const std::vector<double> mu{0.5};
  const std::vector<BeliefState> exact{at_means({0.5})};
  CHECK(learning_error(exact, mu) == 0.0);
  const std::vector<BeliefState> off{at_means({0.9})};
  CHECK(learning_error(off, mu) == doctest::Approx(0.4));

  const std::vector<double> mu2{0.5, 0.5};
  const std::vector<BeliefState> two{at_means({0.8, 0.9}), at_means({0.5, 0.5})};
  CHECK(learning_error(two, mu2) == doctest::Approx(0.125));
  CHECK(learning_error(two, mu2) == doctest::Approx(reference_error({{0.8, 0.9}, {0.5, 0.5}}, mu2)));

  CHECK(learning_error_shared(at_means({0.8, 0.9}), mu2, 3) == doctest::Approx(0.25));
  const std::vector<BeliefState> wrong_k{at_means({0.5})};
  CHECK_THROWS_AS(learning_error(wrong_k, mu2), ConfigError);
}

TEST_CASE("learning error is permutation invariant and matches the reference") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 5, k = 1 + gen() % 6;
    std::vector<double> mu(k);
    for (double& m : mu) m = unit(gen);
    std::vector<std::vector<double>> raw(n, std::vector<double>(k));
    std::vector<BeliefState> beliefs;
    for (auto& row : raw) {
      for (double& v : row) v = unit(gen);
      beliefs.push_back(at_means(row));
    }
    const double e = learning_error(beliefs, mu);
    CHECK(e == doctest::Approx(reference_error(raw, mu)).epsilon(1e-12));

    std::reverse(beliefs.begin(), beliefs.end());
    CHECK(learning_error(beliefs, mu) == doctest::Approx(e).epsilon(1e-12));

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> mu_p(k);
    std::vector<BeliefState> permuted;
    for (std::size_t a = 0; a < k; ++a) mu_p[a] = mu[perm[a]];
    for (const auto& row : raw) {
      std::vector<double> r(k);
      for (std::size_t a = 0; a < k; ++a) r[a] = row[perm[a]];
      permuted.push_back(at_means(r));
    }
    CHECK(learning_error(permuted, mu_p) == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("price-of-anarchy bound") {
  const std::vector<double> close{0.99, 0.98, 0.97, 0.5};
  CHECK(poa_bound(close, 1) == 1.0);
  CHECK(poa_bound(close, 3) == doctest::Approx(1 + (0.98 + 0.97) / 0.99));
  CHECK(poa_bound(close, 3) == doctest::Approx(2.9697).epsilon(1e-4));

  std::vector<double> mu1{0.99, 0.95, 0.94, 0.97, 0.98, 0.98, 0.94, 0.93, 0.92, 0.94, 0.95, 0.94};
  std::sort(mu1.begin(), mu1.end(), std::greater<>());
  CHECK(poa_bound(mu1, 10) > 9.0);
  for (int n = 2; n <= 12; ++n) CHECK(poa_bound(mu1, n) > 1.0);

  const std::vector<double> unsorted{0.5, 0.9};
  CHECK_THROWS_AS(poa_bound(unsorted, 1), ConfigError);
  CHECK_THROWS_AS(poa_bound(close, 5), ConfigError);
}

TEST_CASE("inefficiency ratio") {
  const std::vector<double> a{1, 0, 2, 1}, zero{0, 0, 0, 0}, shorter{1, 1};
  CHECK(inefficiency_ratio(a, a, 0.9) == 1.0);
  CHECK(std::isinf(inefficiency_ratio(a, zero, 0.9)));
  CHECK_THROWS_AS(inefficiency_ratio(a, shorter, 0.9), ConfigError);
  const std::vector<double> half{0.5, 0, 1, 0.5};
  CHECK(inefficiency_ratio(a, half, 0.5) == doctest::Approx(2.0));
  CHECK(discounted_sum(a, 0.5) == doctest::Approx(1 + 0 + 0.5 + 0.125));
}

TEST_CASE("convergence detection") {
  std::vector<ConvergenceSample> steady(5, ConvergenceSample{{0, 1}, -0.1});
  CHECK(detect_convergence(steady, 0.0, 3) == Round{1});
  CHECK(detect_convergence(steady, 0.0, 5) == Round{1});
  CHECK_FALSE(detect_convergence(steady, 0.0, 6).has_value());

  std::vector<ConvergenceSample> settling{{{0, 0}, 0.3}, {{0, 1}, 0.05}, {{0, 1}, 0.0}, {{0, 1}, 0.0}};
  CHECK(detect_convergence(settling, 0.0, 2) == Round{3});
  CHECK(detect_convergence(settling, 0.1, 2) == Round{2});
  CHECK_FALSE(detect_convergence(settling, 0.0, 3).has_value());

  CHECK_THROWS_AS(detect_convergence(steady, -1.0, 1), ConfigError);
  CHECK_THROWS_AS(detect_convergence(steady, 0.0, 0), ConfigError);
}

TEST_CASE("a larger epsilon never converges later") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unit(-0.2, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ConvergenceSample> trace;
    for (int t = 0; t < 60; ++t) trace.push_back({{ArmIndex(gen() % 2)}, unit(gen)});
    const int w = 1 + int(gen() % 4);
    const double e1 = std::abs(unit(gen)), e2 = e1 + std::abs(unit(gen));
    const auto r1 = detect_convergence(trace, e1, w), r2 = detect_convergence(trace, e2, w);
    if (r1) {
      REQUIRE(r2.has_value());
      CHECK(*r2 <= *r1);
    }
  }
}

TEST_CASE("metrics csv format") {
  CHECK(std::string(metrics_csv_header()) == "replication,t,learning_error,social_reward,discounted_cumulative,converged");
  MetricsRecord r;
  r.t = 3;
  r.learning_error = 0.25;
  r.social_reward = 2;
  r.discounted_cumulative = 4.5;
  r.converged = true;
  CHECK(metrics_csv_row(7, r) == "7,3,0.25,2,4.5,1");
}
