#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rlcache {

// Seeded generator whose output is identical on every platform: the engine is
// mt19937_64 (fully specified by the standard) and every derived distribution
// is computed here instead of through the implementation-defined <random>
// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t fnv1a(std::string_view bytes);

// splitmix64 finaliser over a pair of values, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace rlcache
