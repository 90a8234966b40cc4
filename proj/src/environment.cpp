#include "cmab/environment.hpp"

#include <cmath>
#include <string>

#include "cmab/rng.hpp"

namespace cmab {

ArmEnvironment::ArmEnvironment(std::vector<double> true_means, double min_gap, std::uint64_t seed,
                               std::uint32_t collision_salt)
    : true_means_(std::move(true_means)), min_gap_(min_gap), seed_(seed), collision_salt_(collision_salt) {
  if (true_means_.empty()) throw ConfigError("true_means", "at least one arm is required");
  for (std::size_t k = 0; k < true_means_.size(); ++k) {
    const double mu = true_means_[k];
    if (!(mu > 0.0 && mu < 1.0)) {
      throw ConfigError("true_means", "mean of arm " + std::to_string(k) + " must lie in (0,1)");
    }
  }
  if (!(min_gap_ > 0.0)) throw ConfigError("eta", "minimum gap must be positive");
}

bool ArmEnvironment::satisfies_min_gap() const noexcept {
  for (std::size_t i = 0; i < true_means_.size(); ++i)
    for (std::size_t j = i + 1; j < true_means_.size(); ++j)
      if (!(std::abs(true_means_[i] - true_means_[j]) > min_gap_)) return false;
  return true;
}

int ArmEnvironment::reward_draw(Round t, ArmIndex arm) const noexcept {
  CounterRng rng(seed_, Stream::kEnvironmentReward, static_cast<std::uint32_t>(t),
                 static_cast<std::uint32_t>(arm));
  return rng.bernoulli(true_means_[arm]) ? 1 : 0;
}

RoundOutcome ArmEnvironment::resolve(std::span<const ArmIndex> choices) {
  if (choices.empty()) throw ConfigError("choices", "at least one player must choose");
  const std::size_t k_arms = true_means_.size();
  for (ArmIndex c : choices)
    if (c >= k_arms) throw ConfigError("choices", "arm index " + std::to_string(c) + " out of range");

  ++round_;
  const std::size_t n = choices.size();
  RoundOutcome out;
  out.choices.assign(choices.begin(), choices.end());
  out.collision_flags.assign(n, true);
  out.realized_rewards.assign(n, 0);
  out.occupancy.assign(k_arms, 0);
  out.observed_occupancy.assign(n, std::nullopt);

  std::vector<std::vector<PlayerIndex>> choosers(k_arms);
  for (PlayerIndex p = 0; p < n; ++p) choosers[choices[p]].push_back(p);

  for (ArmIndex k = 0; k < k_arms; ++k) {
    const auto& who = choosers[k];
    const int m = static_cast<int>(who.size());
    out.occupancy[k] = m;
    if (m == 0) continue;
    std::size_t winner = 0;
    if (m > 1) {
      CounterRng lottery(seed_, Stream::kCollisionSelection, static_cast<std::uint32_t>(round_),
                         static_cast<std::uint32_t>(k) ^ (collision_salt_ << 16));
      winner = lottery.uniform_below(static_cast<std::uint32_t>(m));
    }
    const int reward = reward_draw(round_, k);
    for (std::size_t i = 0; i < who.size(); ++i) {
      const PlayerIndex p = who[i];
      if (i == winner) {
        out.collision_flags[p] = false;
        out.realized_rewards[p] = reward;
      } else {
        out.observed_occupancy[p] = m;
      }
    }
  }
  return out;
}

RoundOutcome resolve_round(std::span<const ArmIndex> choices, ArmEnvironment& env) {
  return env.resolve(choices);
}

std::vector<double> selection_frequency_check(int m, int trials, std::uint64_t seed) {
  if (m < 2) throw ConfigError("m", "need at least two choosers");
  if (trials < 1) throw ConfigError("trials", "need at least one trial");
  ArmEnvironment env({0.5}, 0.01, seed);
  const std::vector<ArmIndex> choices(static_cast<std::size_t>(m), 0);
  std::vector<double> freq(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < trials; ++i) {
    const RoundOutcome out = env.resolve(choices);
    for (std::size_t p = 0; p < freq.size(); ++p)
      if (!out.collision_flags[p]) freq[p] += 1.0;
  }
  for (double& f : freq) f /= trials;
  return freq;
}

}  // namespace cmab
