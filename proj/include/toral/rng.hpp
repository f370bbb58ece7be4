#pragma once

// SplitMix64 counter-based generator.
//
// The k-th output of a stream with seed s is mix64(s + (k+1) * GAMMA), where
// GAMMA = 0x9E3779B97F4A7C15 and mix64 is the SplitMix64 finalizer. Child
// streams are derived with split(seed, id) = mix64(seed ^ mix64(id + GAMMA)),
// so per-replicate streams do not depend on thread scheduling.
//
// Uniform doubles use the top 53 bits; normals use Box-Muller on two
// uniforms. Neither relies on std:: distributions, whose outputs are
// implementation-defined.

#include <cstdint>

#include <gmpxx.h>

namespace toral {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Seed of child stream `id`.
  static constexpr std::uint64_t split(std::uint64_t seed, std::uint64_t id) noexcept {
    return mix64(seed ^ mix64(id + kGoldenGamma));
  }

  Rng child(std::uint64_t id) const noexcept { return Rng(split(seed_, id)); }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform on [0, bound), bound >= 1, unbiased by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform on [0, bound), bound >= 1, arbitrary precision.
  mpz_class below(const mpz_class& bound);

  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace toral
