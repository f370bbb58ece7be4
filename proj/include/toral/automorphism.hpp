#pragma once

// Exact torus automorphisms acting on the rational grid (1/q)Z^d / Z^d.
//
// A point is stored as its numerator vector modulo q, so iterating the map is
// integer arithmetic with no rounding: the grid is invariant under S and the
// dynamics there is exactly the true dynamics restricted to it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "toral/int_matrix.hpp"
#include "toral/rng.hpp"

namespace toral {

/// 2^61 - 1 (a Mersenne prime). Periods of the mod-q dynamics are far longer
/// than any orbit this library simulates.
inline const BigInt& default_denominator() {
  static const BigInt q("2305843009213693951");
  return q;
}

class RationalTorusPoint {
 public:
  /// Throws InvalidArgument unless q >= 1 and 0 <= numerators[i] < q.
  RationalTorusPoint(BigInt denominator, std::vector<BigInt> numerators);

  /// The origin of T^d on the q-grid.
  static RationalTorusPoint zero(std::size_t dim, BigInt denominator);

  const BigInt& denominator() const noexcept { return q_; }
  const std::vector<BigInt>& numerators() const noexcept { return num_; }
  std::size_t dim() const noexcept { return num_.size(); }

  /// Coordinates numerators[i]/q, each correctly rounded to the nearest double;
  /// a value that would round up to 1.0 is returned as the largest double below 1.
  std::vector<double> to_real() const;

  friend bool operator==(const RationalTorusPoint&, const RationalTorusPoint&) = default;

 private:
  BigInt q_;
  std::vector<BigInt> num_;
};

struct Orbit {
  RationalTorusPoint start;
  std::size_t length = 0;
  /// x0, T x0, ..., T^length x0.
  std::vector<RationalTorusPoint> points;
};

class TorusAutomorphism {
 public:
  /// Throws DeterminantNotUnit when |det m| != 1.
  explicit TorusAutomorphism(IntMatrix m);

  const IntMatrix& matrix() const noexcept { return matrix_; }
  const IntMatrix& inverse_matrix() const noexcept { return inverse_; }
  int det() const noexcept { return det_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }

  RationalTorusPoint apply(const RationalTorusPoint& x) const;
  RationalTorusPoint apply_inverse(const RationalTorusPoint& x) const;

  /// Throws InvalidArgument when n == 0.
  Orbit orbit(const RationalTorusPoint& x0, std::size_t n) const;

 private:
  IntMatrix matrix_;
  IntMatrix inverse_;
  int det_ = 1;
};

inline TorusAutomorphism new_automorphism(IntMatrix m) { return TorusAutomorphism(std::move(m)); }

/// Numerators i.i.d. uniform on [0, q). Throws InvalidArgument if q < 2.
RationalTorusPoint random_point(std::size_t dim, const BigInt& q, Rng& rng);

/// Machine-integer iteration of x -> S x mod q.
///
/// Only constructed when q < 2^63 and max_i sum_j |S_ij| * (q - 1) < 2^126,
/// which bounds every 128-bit accumulator used by step().
class FastStepper {
 public:
  static std::optional<FastStepper> try_create(const IntMatrix& m, const BigInt& q);

  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t denominator() const noexcept { return q_; }

  /// x <- S x mod q in place. x.size() == dim().
  void step(std::span<std::uint64_t> x) const noexcept;

  /// Coordinates as double(num) / double(q), clamped below 1 (a few ulp from
  /// the correctly rounded value).
  void to_real(std::span<const std::uint64_t> x, std::span<double> out) const noexcept;

 private:
  std::size_t dim_ = 0;
  std::uint64_t q_ = 0;
  std::vector<std::int64_t> entries_;
};

/// Iterates one orbit and exposes real coordinates of the current point.
/// Uses FastStepper when certified, exact big-integer arithmetic otherwise.
/// Not thread-safe; create one per orbit.
class OrbitCursor {
 public:
  OrbitCursor(const TorusAutomorphism& map, const RationalTorusPoint& start);

  void advance();
  /// Real coordinates of the current point.
  std::span<const double> coords() const noexcept { return coords_; }
  RationalTorusPoint point() const;

 private:
  void refresh();

  const TorusAutomorphism* map_;
  std::optional<FastStepper> fast_;
  std::vector<std::uint64_t> fast_state_;
  std::optional<RationalTorusPoint> slow_state_;
  std::vector<double> coords_;
};

}  // namespace toral
