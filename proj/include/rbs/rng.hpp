#pragma once

#include <cstdint>

namespace rbs {

// SplitMix64 stream used everywhere randomness is needed. Two properties the
// rest of the code relies on:
//   * below(n) consumes exactly one 64-bit draw for any n (multiply-shift,
//     bias < 2^-64), so call sequences stay aligned across graphs of
//     different size;
//   * derive() gives independent child seeds, so Monte Carlo draws, balls
//     and experiment repetitions each get their own reproducible substream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDULL;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ULL;
    z ^= z >> 33;
    return z;
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a) {
    return mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ (a + 0xD6E8FEB86659FD93ULL));
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rbs
