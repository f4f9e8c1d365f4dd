/**
 * @file utbreaks/rng.hpp
 * @brief Deterministic seedable RNG (splitmix64) for verify runs and tests.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_RNG_HPP
#define UTBREAKS_RNG_HPP

#include <cstdint>

namespace utbreaks {

// std::mt19937 output is implementation-pinned too, but splitmix64 is short
// enough to carry here and keeps diagnostics byte-identical everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bound > 0.
  uint64_t below(uint64_t bound) { return next() % bound; }

  // Uniform in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool chance(uint32_t num, uint32_t den) { return below(den) < num; }

 private:
  uint64_t state_;
};

}  // namespace utbreaks

#endif  // UTBREAKS_RNG_HPP
