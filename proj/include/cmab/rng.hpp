#pragma once

#include <array>
#include <cstdint>

namespace cmab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every random quantity in the simulator is a pure function of
/// (seed, stream, counter words), so draws never depend on evaluation order
/// and results are reproducible across platforms and languages.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key) noexcept;
};

/// Independent sub-streams. The numeric values are part of the output format.
enum class Stream : std::uint32_t {
  kEnvironmentReward = 1,
  kCollisionSelection = 2,
  kPolicy = 3,
  kPriors = 4,
};

/// Sequential view over one Philox counter lane: the first three counter
/// words identify the draw site, the fourth is advanced as words are consumed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint32_t a, std::uint32_t b) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() noexcept;
  /// Unbiased integer in [0, bound) by rejection; bound must be positive.
  std::uint32_t uniform_below(std::uint32_t bound) noexcept;
  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  Philox4x32::Key key_;
  Philox4x32::Block counter_;
  Philox4x32::Block buffer_{};
  int used_ = 4;
};

}  // namespace cmab
