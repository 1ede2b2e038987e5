#pragma once

#include <cmath>
#include <cstdint>

namespace ndda {

/// Counter-based 64-bit generator (splitmix64 finalizer over an
/// incrementing counter). Streams are derived by hashing (seed, stream id),
/// so independent parts of an instance draw from disjoint sequences and a
/// run is reproducible from a single seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Derive the seed of a sub-stream.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL));
  }

  Rng stream(std::uint64_t id) const { return Rng(derive(seed_, id)); }

  std::uint64_t next_u64() { return mix(seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via the polar (Marsaglia) method; one spare cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ndda
