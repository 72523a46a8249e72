#pragma once

#include <cstdint>
#include <random>

#include "gpr/core.hpp"

namespace gpr {

/// Seedable, splittable generator: std::mt19937_64 with SplitMix64 seed
/// derivation. Distributions are implemented locally.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream, deterministic in (parent seed, stream id).
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();
  /// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
  cplx complex_normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gpr
