#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dcerm {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. This is the published mixing function used for all
/// seed derivation, so derived seeds are stable across builds and schedules.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Folds a sequence of counters into a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t p : parts) s = splitmix64(s ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

// Stream identifiers for derive_seed.
namespace stream {
inline constexpr std::uint64_t dataset = 1;
inline constexpr std::uint64_t partition = 2;
inline constexpr std::uint64_t risk_mc = 3;
inline constexpr std::uint64_t reference = 4;
inline constexpr std::uint64_t covering = 5;
}  // namespace stream

}  // namespace dcerm
