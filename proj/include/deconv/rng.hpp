#pragma once

#include <cstdint>
#include <random>

namespace deconv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream keyed by (seed, cell, trial): results do not depend on the order in
// which cells or trials are visited.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t cell = 0, std::uint64_t trial = 0)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ cell) ^ (trial + 0x632be59bd9b4e019ULL))) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deconv
