#pragma once

#include <cstdint>
#include <random>

namespace ntgof {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Generator for work item `index` of stream `stream` under `seed`.
/// The state depends only on the triple, never on which thread runs the item.
/// Seeded from a single hashed word: a seed_seq costs tens of microseconds per
/// generator, which dominates probes with millions of short replications.
inline Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(mix64(mix64(seed ^ mix64(stream)) + index));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace ntgof
