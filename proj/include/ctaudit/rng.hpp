#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ctaudit {

/// xoshiro256** 1.0 (Blackman and Vigna, 2018), state seeded with
/// SplitMix64. `jump()` advances by 2^128 draws, so stream i (the seeded
/// state after i jumps) never overlaps stream j in practice.
class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  void jump();

  /// Unbiased integer in [0, bound), bound > 0 (Lemire's multiply-shift
  /// with rejection).
  std::uint64_t below(std::uint64_t bound);

  const std::array<std::uint64_t, 4>& state() const { return state_; }

private:
  std::array<std::uint64_t, 4> state_;
};

/// One step of SplitMix64 on `x`; returns the output and advances `x`.
std::uint64_t splitmix64(std::uint64_t& x);

}  // namespace ctaudit
