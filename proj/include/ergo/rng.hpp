#pragma once

#include <cstdint>

namespace ergo {

/// splitmix64: tiny deterministic generator with stable output across
/// platforms, used for every seeded choice in the toolkit.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
};

/// Stable 64-bit hash of a string (FNV-1a), for deriving per-item seeds.
inline std::uint64_t stable_hash(const char* s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (; *s; ++s) h = (h ^ std::uint64_t(static_cast<unsigned char>(*s))) *
                      1099511628211ULL;
  return h;
}

}  // namespace ergo
