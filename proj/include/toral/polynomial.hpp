#pragma once

// Dense univariate polynomials over Z and Q, lowest degree first.

#include <cstddef>
#include <string>
#include <vector>

#include "toral/int_matrix.hpp"

namespace toral {

class RatPolynomial;

class IntPolynomial {
 public:
  IntPolynomial() = default;
  /// Trailing zero coefficients are stripped; the zero polynomial has no
  /// coefficients and degree -1.
  explicit IntPolynomial(std::vector<BigInt> coefficients);
  IntPolynomial(std::initializer_list<long> coefficients);

  const std::vector<BigInt>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const BigInt& operator[](std::size_t i) const { return c_[i]; }
  const BigInt& leading() const { return c_.back(); }

  BigRat evaluate(const BigRat& x) const;

  /// x^deg * p(1/x).
  IntPolynomial reversed() const;
  IntPolynomial derivative() const;

  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  RatPolynomial to_rational() const;

  /// e.g. "x^2 - 3*x + 1".
  std::string to_string() const;

 private:
  void normalize();
  std::vector<BigInt> c_;
};

class RatPolynomial {
 public:
  RatPolynomial() = default;
  explicit RatPolynomial(std::vector<BigRat> coefficients);

  const std::vector<BigRat>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const BigRat& operator[](std::size_t i) const { return c_[i]; }
  const BigRat& leading() const { return c_.back(); }

  BigRat evaluate(const BigRat& x) const;
  RatPolynomial derivative() const;
  RatPolynomial monic() const;
  RatPolynomial operator-() const;

  friend RatPolynomial operator+(const RatPolynomial& a, const RatPolynomial& b);
  friend RatPolynomial operator-(const RatPolynomial& a, const RatPolynomial& b);
  friend RatPolynomial operator*(const RatPolynomial& a, const RatPolynomial& b);
  friend bool operator==(const RatPolynomial&, const RatPolynomial&) = default;

  struct DivMod;
  /// Euclidean division; throws InvalidArgument on a zero divisor.
  DivMod divmod(const RatPolynomial& divisor) const;

  /// Clears denominators and content; positive leading coefficient.
  IntPolynomial primitive_part() const;

 private:
  void normalize();
  std::vector<BigRat> c_;
};

struct RatPolynomial::DivMod {
  RatPolynomial quotient;
  RatPolynomial remainder;
};

/// Monic gcd over Q; gcd(0, 0) = 0.
RatPolynomial gcd(const RatPolynomial& a, const RatPolynomial& b);

/// Number of distinct real roots in (lo, hi] by a Sturm sequence.
/// lo < hi; p must be nonzero.
int sturm_count(const RatPolynomial& p, const BigRat& lo, const BigRat& hi);

}  // namespace toral
