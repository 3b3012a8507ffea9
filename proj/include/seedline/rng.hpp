#pragma once

#include <cstdint>
#include <random>

namespace seedline {

// All randomness in the library flows through these helpers on top of
// std::mt19937_64 (whose raw output sequence is pinned by the standard).
// std::uniform_real_distribution and friends are implementation-defined, so
// they are deliberately not used anywhere determinism matters.

// splitmix64: standard seed-spreading step so nearby seeds give unrelated streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

// Uniform in [0, 1): 53 high bits of one engine draw.
inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection sampling (no modulo bias).
inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

} // namespace seedline
