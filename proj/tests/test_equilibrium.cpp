#include <doctest.h>

#include <random>

#include "cmab/equilibrium.hpp"

using namespace cmab;

namespace {

// Every pure assignment in K^N whose occupancy has no profitable unilateral move.
std::vector<std::vector<int>> brute_force_equilibria(const std::vector<double>& mu, int n) {
  const int k = static_cast<int>(mu.size());
  std::vector<std::vector<int>> found;
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::vector<int> occ(mu.size(), 0);
    for (int a : assign) ++occ[a];
    bool stable = true;
    for (int a : assign)
      for (int b = 0; b < k; ++b)
        if (b != a && mu[b] / (occ[b] + 1) > mu[a] / occ[a]) stable = false;
    if (stable) found.push_back(occ);
    int pos = 0;
    while (pos < n && ++assign[pos] == k) assign[pos++] = 0;
    if (pos == n) break;
  }
  return found;
}

}  // namespace

TEST_CASE("greedy occupancy examples") {
  const std::vector<double> a{0.9, 0.3};
  CHECK(equilibrium_occupancy(a, 3).counts == std::vector<int>{3, 0});
  const std::vector<double> b{0.5, 0.5};
  CHECK(equilibrium_occupancy(b, 2).counts == std::vector<int>{1, 1});
  const std::vector<double> c{0.8};
  const OccupancyProfile single = equilibrium_occupancy(c, 4);
  CHECK(single.counts == std::vector<int>{4});
  CHECK(single.per_arm_value[0] == doctest::Approx(0.2));
  CHECK_THROWS_AS(equilibrium_occupancy(c, 0), ConfigError);
}

TEST_CASE("greedy profile matches a brute-force equilibrium for a hand example") {
  const std::vector<double> mu{0.9, 0.3};
  const auto all = brute_force_equilibria(mu, 3);
  CHECK(std::find(all.begin(), all.end(), equilibrium_occupancy(mu, 3).counts) != all.end());
}

TEST_CASE("certify epsilon-NE examples") {
  const std::vector<double> mu{0.9, 0.8};
  const NeCertificate split = certify_epsilon_ne(std::vector<ArmIndex>{0, 1}, mu, 0.0);
  CHECK(split.is_epsilon_ne);
  const NeCertificate stacked = certify_epsilon_ne(std::vector<ArmIndex>{0, 0}, mu, 0.0);
  CHECK_FALSE(stacked.is_epsilon_ne);
  CHECK(stacked.worst_gain == doctest::Approx(0.35));
  CHECK(certify_epsilon_ne(std::vector<ArmIndex>{0, 0}, mu, 0.4).is_epsilon_ne);
  CHECK(certify_epsilon_ne(std::vector<ArmIndex>{0}, mu, 0.0).is_epsilon_ne);
  CHECK_THROWS_AS(certify_epsilon_ne(std::vector<ArmIndex>{0}, mu, -1.0), ConfigError);
}

TEST_CASE("per-player certification uses each player's own belief") {
  const std::vector<std::vector<double>> beliefs{{0.9, 0.1}, {0.1, 0.9}};
  CHECK(certify_epsilon_ne(std::vector<ArmIndex>{0, 1}, beliefs, 0.0).is_epsilon_ne);
  CHECK_FALSE(certify_epsilon_ne(std::vector<ArmIndex>{1, 0}, beliefs, 0.0).is_epsilon_ne);
  const std::vector<std::vector<double>> short_list{{0.9, 0.1}};
  CHECK_THROWS_AS(certify_epsilon_ne(std::vector<ArmIndex>{0, 1}, short_list, 0.0), ConfigError);
}

TEST_CASE("greedy output certifies and is scale invariant") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + int(gen() % 6), n = 1 + int(gen() % 8);
    std::vector<double> mu(static_cast<std::size_t>(k));
    for (double& m : mu) m = unit(gen);
    const OccupancyProfile prof = equilibrium_occupancy(mu, n);
    int total = 0;
    std::vector<ArmIndex> choices;
    for (int a = 0; a < k; ++a) {
      total += prof.counts[a];
      choices.insert(choices.end(), prof.counts[a], static_cast<ArmIndex>(a));
    }
    CHECK(total == n);
    CHECK(certify_epsilon_ne(choices, mu, 0.0).is_epsilon_ne);

    const std::vector<ArmIndex> random_choices = [&] {
      std::vector<ArmIndex> c(static_cast<std::size_t>(n));
      for (auto& x : c) x = gen() % k;
      return c;
    }();
    std::vector<double> scaled = mu;
    for (double& m : scaled) m *= 0.25;
    CHECK(certify_epsilon_ne(random_choices, mu, 0.0).is_epsilon_ne ==
          certify_epsilon_ne(random_choices, scaled, 0.0).is_epsilon_ne);
  }
}

TEST_CASE("occupancy_of counts choosers") {
  CHECK(occupancy_of(std::vector<ArmIndex>{2, 0, 2}, 3) == std::vector<int>{1, 0, 2});
  CHECK_THROWS_AS(occupancy_of(std::vector<ArmIndex>{3}, 3), ConfigError);
}
