#pragma once

#include <cstdint>
#include <random>

namespace simrt {

/// Seeded generator owned by a single simulation run. Only the raw
/// mt19937_64 stream is used (its output is fixed by the standard), so draws
/// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform integer on the closed interval [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return lo;
    const std::uint64_t span = hi - lo;
    if (span == UINT64_MAX) return engine_();
    const std::uint64_t range = span + 1;
    // Rejection sampling on the largest multiple of `range`.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range + 1) % range;
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return lo + x % range;
  }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace simrt
