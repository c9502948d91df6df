#pragma once

#include <cstdint>

namespace infsel {

// SplitMix64 (Steele, Lea & Flood). Serves as the project-wide PRNG and as
// the seed-mixing finalizer, so every stream is a pure function of the
// user-supplied 64-bit seed. Constants: 0x9E3779B97F4A7C15,
// 0xBF58476D1CE4E5B9, 0x94D049BB133111EB.
struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr SplitMix64() = default;
  explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound), bound >= 1, by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }
};

constexpr std::uint64_t mix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic seed derivation: mix64(seed, k) folds a stream index into a
// base seed. Chained overloads give per-(grid point, replicate, purpose)
// streams that are independent of scheduling order.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64_finalize(a + 0x9E3779B97F4A7C15ULL * (b + 0x632BE59BD9B4E019ULL));
}
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b), c);
}
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return mix64(mix64(a, b, c), d);
}

}  // namespace infsel
