// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace structprob {

// The project PRNG is xoshiro256** (Blackman & Vigna), seeded through
// SplitMix64. Per-trial sub-streams are keyed by (seed, index) so that a
// trial's draw never depends on how many trials ran before it.

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Finalizer of SplitMix64 applied to a single word.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t state = x;
  return splitmix64_next(state);
}

/// Order-sensitive combination of a seed and a stream index.
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ (index + 0x632BE59BD9B4E019ULL + (seed << 6) + (seed >> 2)));
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double on [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Independent sub-stream for trial `index` of a run seeded with `seed`.
inline constexpr Xoshiro256 substream(std::uint64_t seed, std::uint64_t index) noexcept {
  return Xoshiro256(derive_key(seed, index));
}

}  // namespace structprob
