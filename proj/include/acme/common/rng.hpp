#pragma once

#include <cstdint>
#include <random>

namespace acme {

// Seeded PRNG with platform-independent variate generation. The standard
// <random> distributions are implementation-defined, so every transform from
// raw 64-bit output to a variate lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  double normal();
  double exponential(double mean);

  // Independent child stream, stable for a given (parent seed, stream id).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace acme
