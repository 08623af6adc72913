#pragma once

// Reproducible random streams.
//
// Stream (seed, s) is std::mt19937_64 seeded with splitmix64 of
// seed + 0x9E3779B97F4A7C15 * (s + 1). Integers in [0, n) use rejection on
// the top of the 64-bit range (unbiased); doubles in [0, 1) use the high 53
// bits. Any implementation following these three rules reproduces the same
// sample streams.

#include <cstdint>
#include <random>

namespace hsaw {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

  std::uint64_t next() { return eng_(); }

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    while (true) {
      const std::uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hsaw
