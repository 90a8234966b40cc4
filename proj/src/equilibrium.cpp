#include "cmab/equilibrium.hpp"

#include <algorithm>
#include <limits>

namespace cmab {

OccupancyProfile equilibrium_occupancy(std::span<const double> belief_means, int n_players) {
  if (n_players < 1) throw ConfigError("n_players", "need at least one player");
  if (belief_means.empty()) throw ConfigError("belief_means", "need at least one arm");
  const std::size_t k_arms = belief_means.size();
  OccupancyProfile out;
  out.counts.assign(k_arms, 0);
  for (int placed = 0; placed < n_players; ++placed) {
    ArmIndex best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (ArmIndex a = 0; a < k_arms; ++a) {
      const double v = belief_means[a] / (out.counts[a] + 1);
      if (v > best_value) {
        best_value = v;
        best = a;
      }
    }
    ++out.counts[best];
  }
  out.per_arm_value.resize(k_arms);
  for (ArmIndex a = 0; a < k_arms; ++a) out.per_arm_value[a] = belief_means[a] / std::max(out.counts[a], 1);
  return out;
}

std::vector<int> occupancy_of(std::span<const ArmIndex> choices, std::size_t num_arms) {
  std::vector<int> occ(num_arms, 0);
  for (ArmIndex c : choices) {
    if (c >= num_arms) throw ConfigError("choices", "arm index out of range");
    ++occ[c];
  }
  return occ;
}

namespace {

double deviation_gain(ArmIndex current, std::span<const int> occ, std::span<const double> means) {
  const double stay = means[current] / occ[current];
  double best = -std::numeric_limits<double>::infinity();
  for (ArmIndex alt = 0; alt < means.size(); ++alt) {
    if (alt == current) continue;
    best = std::max(best, means[alt] / (occ[alt] + 1));
  }
  return best - stay;
}

template <typename MeansFor>
NeCertificate certify(std::span<const ArmIndex> choices, std::size_t num_arms, double epsilon, MeansFor&& means_for) {
  if (epsilon < 0.0) throw ConfigError("epsilon", "must be non-negative");
  const std::vector<int> occ = occupancy_of(choices, num_arms);
  NeCertificate cert;
  cert.worst_gain = -std::numeric_limits<double>::infinity();
  if (num_arms == 1) cert.worst_gain = 0.0;
  for (PlayerIndex p = 0; p < choices.size(); ++p) {
    if (num_arms == 1) break;
    cert.worst_gain = std::max(cert.worst_gain, deviation_gain(choices[p], occ, means_for(p)));
  }
  cert.is_epsilon_ne = cert.worst_gain <= epsilon;
  return cert;
}

}  // namespace

NeCertificate certify_epsilon_ne(std::span<const ArmIndex> choices, std::span<const double> belief_means,
                                 double epsilon) {
  return certify(choices, belief_means.size(), epsilon, [&](PlayerIndex) { return belief_means; });
}

NeCertificate certify_epsilon_ne(std::span<const ArmIndex> choices,
                                 std::span<const std::vector<double>> per_player_means, double epsilon) {
  if (per_player_means.size() != choices.size())
    throw ConfigError("per_player_means", "need one belief vector per player");
  const std::size_t k_arms = per_player_means.empty() ? 0 : per_player_means.front().size();
  for (const auto& m : per_player_means)
    if (m.size() != k_arms) throw ConfigError("per_player_means", "belief vectors disagree on arm count");
  return certify(choices, k_arms, epsilon,
                 [&](PlayerIndex p) { return std::span<const double>(per_player_means[p]); });
}

}  // namespace cmab
