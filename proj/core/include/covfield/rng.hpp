#pragma once

#include <cstdint>

namespace covfield {

/// SplitMix64 used as a counter-based generator: draw k of stream s is
/// mix(s + (k+1)·0x9E3779B97F4A7C15). Uniform and normal variates are
/// derived here rather than through <random> distributions so that a seed
/// produces the same numbers on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

/// Per-replicate stream seed.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
  return seed ^ replicate;
}

}  // namespace covfield
