#pragma once

// Reference computations used only by the tests.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <tuple>
#include <utility>

namespace oracle {

// Finite-horizon belief MDP for one decision maker over two arms. The
// predictive probability of a success is the current empirical mean (prior
// while unpulled), and each pull updates that arm's counts. Returns the
// discounted value of pulling arm 0 and arm 1 first.
class TwoArmBeliefDp {
 public:
  TwoArmBeliefDp(std::array<double, 2> priors, double rho) : priors_(priors), rho_(rho) {}

  std::pair<double, double> first_move_values(std::array<std::int64_t, 2> s, std::array<std::int64_t, 2> c,
                                              int horizon) {
    return {q(s, c, 0, horizon), q(s, c, 1, horizon)};
  }

 private:
  double mean(const std::array<std::int64_t, 2>& s, const std::array<std::int64_t, 2>& c, int k) const {
    return c[k] == 0 ? priors_[k] : double(s[k]) / double(c[k]);
  }

  double q(std::array<std::int64_t, 2> s, std::array<std::int64_t, 2> c, int k, int left) {
    const double p = mean(s, c, k);
    auto win = s, pulls = c;
    ++pulls[k];
    ++win[k];
    return p + rho_ * (p * value(win, pulls, left - 1) + (1 - p) * value(s, pulls, left - 1));
  }

  double value(const std::array<std::int64_t, 2>& s, const std::array<std::int64_t, 2>& c, int left) {
    if (left == 0) return 0.0;
    const auto key = std::make_tuple(s[0], c[0], s[1], c[1], left);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = std::max(q(s, c, 0, left), q(s, c, 1, left));
    memo_.emplace(key, v);
    return v;
  }

  std::array<double, 2> priors_;
  double rho_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, int>, double> memo_;
};

}  // namespace oracle
