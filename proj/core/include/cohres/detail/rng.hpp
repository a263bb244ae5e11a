#pragma once

#include <cstdint>

namespace cohres::detail {

// SplitMix64: counter-style generator with cheap stream derivation, so
// parallel trials stay reproducible under any scheduling.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Derives an independent stream seed for sub-task `idx` of a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t idx) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (idx + 1)));
  g.next();
  return g.next();
}

}  // namespace cohres::detail
