#pragma once

// Helpers shared by the test binaries. Nothing here calls into the library's
// own algorithms, so these can serve as oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "toral/int_matrix.hpp"
#include "toral/rng.hpp"

namespace toral::test {

using SmallMatrix = std::vector<std::vector<long>>;

inline IntMatrix to_int_matrix(const SmallMatrix& m) {
  std::vector<std::vector<BigInt>> rows;
  for (const auto& r : m) {
    std::vector<BigInt> row;
    for (long v : r) row.emplace_back(v);
    rows.push_back(std::move(row));
  }
  return IntMatrix(rows);
}

/// Random product of elementary row operations and signed permutations, so
/// the determinant is +-1 by construction.
inline SmallMatrix random_unimodular(std::size_t d, Rng& rng, int steps = 6) {
  SmallMatrix m(d, std::vector<long>(d, 0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  for (int s = 0; s < steps; ++s) {
    const std::size_t i = rng.below(d);
    std::size_t j = rng.below(d - 1);
    if (j >= i) ++j;
    const long c = static_cast<long>(rng.below(5)) - 2;
    for (std::size_t k = 0; k < d; ++k) m[i][k] += c * m[j][k];
    if (rng.below(4) == 0) std::swap(m[i], m[j]);
    if (rng.below(4) == 0)
      for (auto& v : m[j]) v = -v;
  }
  return m;
}

/// Integer polynomials as coefficient vectors, lowest degree first.
using SmallPoly = std::vector<long>;

inline SmallPoly poly_mul(const SmallPoly& a, const SmallPoly& b) {
  if (a.empty() || b.empty()) return {};
  SmallPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline SmallPoly poly_add(SmallPoly a, const SmallPoly& b, long sign = 1) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

/// det of a matrix of polynomials by Laplace expansion along the first row.
inline SmallPoly poly_det(const std::vector<std::vector<SmallPoly>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  SmallPoly total;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<SmallPoly>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<SmallPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    total = poly_add(total, poly_mul(m[0][c], poly_det(minor)), c % 2 == 0 ? 1 : -1);
  }
  return total;
}

/// det(xI - m) by cofactor expansion.
inline SmallPoly cofactor_char_poly(const SmallMatrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<SmallPoly>> a(n, std::vector<SmallPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = i == j ? SmallPoly{-m[i][j], 1} : (m[i][j] == 0 ? SmallPoly{} : SmallPoly{-m[i][j]});
  return poly_det(a);
}

/// Root in (2 ell, 4 ell) of the balance between the two branches of k,
/// by bisection on the branches themselves rather than the cubic.
inline double bisection_p0(int ell, double alpha) {
  auto gap = [&](double p) { return p / (alpha * (p - 2.0 * ell)) - (p - 1.0) * (2.0 * alpha + p) / (p * alpha); };
  double lo = 2.0 * ell * (1.0 + 1e-12), hi = 4.0 * ell;
  if (!(gap(lo) > 0.0 && gap(hi) < 0.0)) return NAN;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// min over p >= max(ell + 2, 2 ell) of k by a dense grid, refined with a
/// ternary search inside the best grid bracket.
inline double oracle_min_k(int ell, double alpha) {
  auto k = [&](double p) {
    return std::max(p / (alpha * (p - 2.0 * ell)), (p - 1.0) * (2.0 * alpha + p) / (p * alpha));
  };
  const double lo = std::max(ell + 2.0, 2.0 * ell) * (1.0 + 1e-13);
  const double hi = 12.0 * ell;
  const int points = 100000;
  int best = 0;
  double best_val = INFINITY;
  for (int i = 0; i <= points; ++i) {
    const double p = lo + (hi - lo) * i / points;
    if (k(p) < best_val) {
      best_val = k(p);
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / points;
  double b = lo + (hi - lo) * std::min(points, best + 1) / points;
  for (int i = 0; i < 300; ++i) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (k(m1) < k(m2)) b = m2;
    else a = m1;
  }
  return std::min(best_val, k(0.5 * (a + b)));
}

/// A measure given by N equally weighted unit atoms (repeats allowed).
struct UnitMeasure {
  std::vector<double> units;
  std::vector<double> atoms;
  std::vector<double> weights;
};

inline UnitMeasure random_unit_measure(std::size_t total, Rng& rng) {
  UnitMeasure m;
  const std::size_t distinct = 1 + rng.below(total);
  std::vector<double> support(distinct);
  for (auto& a : support) a = rng.uniform(-5.0, 5.0);
  for (std::size_t i = 0; i < total; ++i) m.units.push_back(support[i < distinct ? i : rng.below(distinct)]);
  for (double a : support) {
    const auto count = std::count(m.units.begin(), m.units.end(), a);
    m.atoms.push_back(a);
    m.weights.push_back(static_cast<double>(count) / static_cast<double>(total));
  }
  return m;
}

/// Optimal matching between two multisets of N unit atoms, exhausting all
/// permutations.
inline double brute_force_transport(const std::vector<double>& x, std::vector<double> y) {
  std::sort(y.begin(), y.end());
  double best = INFINITY;
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cost += std::abs(x[i] - y[i]);
    best = std::min(best, cost);
  } while (std::next_permutation(y.begin(), y.end()));
  return best / static_cast<double>(x.size());
}

inline const SmallMatrix kCat{{2, 1}, {1, 1}};
inline const SmallMatrix kRotation{{0, -1}, {1, 0}};
/// Ergodic but not hyperbolic on T^4.
inline const SmallMatrix kQuartic{{0, 0, 0, -1}, {1, 0, 0, 2}, {0, 1, 0, 0}, {0, 0, 1, 2}};

}  // namespace toral::test
