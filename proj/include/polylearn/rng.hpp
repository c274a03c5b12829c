#pragma once

#include <cstdint>
#include <random>

namespace polylearn {

/// Generator used everywhere: std::mt19937_64, whose output sequence is fixed
/// by the C++ standard. Per-trial streams are seeded by mixing the run seed
/// with the trial index through SplitMix64.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64/splitmix64-derive/v1";

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(RngSeed, RngSeed) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for sub-task `index` of a run seeded with `seed`.
constexpr RngSeed derive_seed(RngSeed seed, std::uint64_t index) noexcept {
  return RngSeed{splitmix64(seed.value ^ splitmix64(index + 0x5DEECE66DULL))};
}

inline Rng make_rng(RngSeed seed) { return Rng(splitmix64(seed.value)); }

/// Uniform double in [0, 1) from the top 53 bits, independent of the
/// standard library's distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace polylearn
