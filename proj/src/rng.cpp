#include "toral/rng.hpp"

#include <cmath>
#include <numbers>

namespace toral {

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  // Reject the low residue class so every value in [0, bound) is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

mpz_class Rng::below(const mpz_class& bound) {
  if (bound <= 1) return 0;
  if (mpz_fits_ulong_p(bound.get_mpz_t()) && sizeof(unsigned long) == 8) {
    return mpz_class(static_cast<unsigned long>(below(static_cast<std::uint64_t>(bound.get_ui()))));
  }
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t limbs = (bits + 63) / 64;
  const std::size_t top_bits = bits - 64 * (limbs - 1);
  const std::uint64_t top_mask = top_bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
  for (;;) {
    mpz_class r = 0;
    for (std::size_t i = 0; i < limbs; ++i) {
      std::uint64_t word = (*this)();
      if (i == 0) word &= top_mask;
      r <<= 32;
      r += static_cast<unsigned long>(word >> 32);
      r <<= 32;
      r += static_cast<unsigned long>(word & 0xFFFFFFFFULL);
    }
    if (r < bound) return r;
  }
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace toral
