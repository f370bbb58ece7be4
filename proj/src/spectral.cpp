#include "toral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "toral/error.hpp"

namespace toral {

IntPolynomial char_poly(const IntMatrix& a) {
  const std::size_t n = a.dim();
  // Coefficients highest degree first while iterating.
  std::vector<BigInt> c{BigInt(1), BigInt(-a(0, 0))};
  for (std::size_t r = 1; r < n; ++r) {
    std::vector<BigInt> t(r + 2);
    t[0] = 1;
    t[1] = -a(r, r);
    // v = M^k * col, where M is the leading r x r block and col = a[0..r)[r].
    std::vector<BigInt> v(r);
    for (std::size_t i = 0; i < r; ++i) v[i] = a(i, r);
    for (std::size_t k = 0; k < r; ++k) {
      BigInt dot = 0;
      for (std::size_t i = 0; i < r; ++i) dot += a(r, i) * v[i];
      t[k + 2] = -dot;
      if (k + 1 < r) {
        std::vector<BigInt> next(r);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < r; ++j) next[i] += a(i, j) * v[j];
        v = std::move(next);
      }
    }
    std::vector<BigInt> next_c(r + 2);
    for (std::size_t i = 0; i < r + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, r); ++j) next_c[i] += t[i - j] * c[j];
    c = std::move(next_c);
  }
  std::reverse(c.begin(), c.end());
  return IntPolynomial(std::move(c));
}

unsigned euler_phi(unsigned m) {
  unsigned result = m;
  unsigned rest = m;
  for (unsigned p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    while (rest % p == 0) rest /= p;
    result -= result / p;
  }
  if (rest > 1) result -= result / rest;
  return result;
}

IntPolynomial cyclotomic(unsigned m) {
  if (m == 0) throw Error(Errc::InvalidArgument, "cyclotomic index must be positive");
  static std::mutex mutex;
  static std::map<unsigned, IntPolynomial> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
  }
  // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d.
  std::vector<BigRat> xm1(m + 1);
  xm1[0] = -1;
  xm1[m] = 1;
  RatPolynomial num{std::move(xm1)};
  for (unsigned d = 1; d < m; ++d)
    if (m % d == 0) num = num.divmod(cyclotomic(d).to_rational()).quotient;
  IntPolynomial result = num.primitive_part();
  std::lock_guard lock(mutex);
  cache.emplace(m, result);
  return result;
}

ErgodicityCertificate is_ergodic(const IntMatrix& m) {
  const IntPolynomial p = char_poly(m);
  const RatPolynomial pr = p.to_rational();
  const unsigned d = static_cast<unsigned>(m.dim());
  ErgodicityCertificate cert;
  cert.searched_up_to = 2 * d * d;
  for (unsigned k = 1; k <= cert.searched_up_to; ++k) {
    if (euler_phi(k) > d) continue;
    if (gcd(pr, cyclotomic(k).to_rational()).degree() > 0) cert.cyclotomic_factors.push_back(k);
  }
  cert.ergodic = cert.cyclotomic_factors.empty();
  return cert;
}

ErgodicityCertificate is_ergodic(const TorusAutomorphism& map) { return is_ergodic(map.matrix()); }

namespace {

// Strips every factor (x - root) from g, returning the multiplicity removed.
int strip_root(RatPolynomial& g, long root) {
  const RatPolynomial linear{{BigRat(-root), BigRat(1)}};
  int count = 0;
  while (g.degree() > 0 && g.evaluate(BigRat(root)) == 0) {
    g = g.divmod(linear).quotient;
    ++count;
  }
  return count;
}

}  // namespace

int count_unit_circle_roots(const IntPolynomial& p) {
  if (p.is_zero() || p[0] == 0) throw Error(Errc::ZeroConstantTerm, "p(0) must be nonzero");
  if (p.degree() == 0) return 0;
  // Unit-circle roots are closed under z -> 1/z with equal multiplicity, so
  // they all survive in the self-reciprocal part with full multiplicity.
  RatPolynomial g = gcd(p.to_rational(), p.reversed().to_rational());
  const int at_plus_one = strip_root(g, 1);
  const int at_minus_one = strip_root(g, -1);
  const int deg = g.degree();
  if (deg <= 0) return at_plus_one + at_minus_one;
  if (deg % 2 != 0) throw Error(Errc::InternalInconsistency, "self-reciprocal part of odd degree after removing +-1");
  const std::size_t half = static_cast<std::size_t>(deg / 2);
  for (std::size_t i = 0; i <= static_cast<std::size_t>(deg); ++i)
    if (g[i] != g[static_cast<std::size_t>(deg) - i])
      throw Error(Errc::InternalInconsistency, "self-reciprocal part is not palindromic");

  // x^{-m} g(x) = c_m + sum_j c_{m+j} (x^j + x^{-j}) and x^j + x^{-j} = D_j(x + 1/x)
  // with D_0 = 2, D_1 = y, D_{j+1} = y D_j - D_{j-1}.
  const RatPolynomial y{{BigRat(0), BigRat(1)}};
  RatPolynomial d_prev{{BigRat(2)}};
  RatPolynomial d_cur = y;
  RatPolynomial halved{{g[half]}};
  for (std::size_t j = 1; j <= half; ++j) {
    halved = halved + RatPolynomial{{g[half + j]}} * d_cur;
    RatPolynomial d_next = y * d_cur - d_prev;
    d_prev = std::move(d_cur);
    d_cur = std::move(d_next);
  }

  // Real roots of the halved polynomial in (-2, 2) correspond to conjugate
  // pairs on the circle. Count with multiplicity: the number of roots of
  // multiplicity > j equals the number of distinct roots of the j-th
  // iterated gcd with the derivative.
  int in_interval = 0;
  RatPolynomial layer = halved;
  while (layer.degree() > 0) {
    in_interval += sturm_count(layer, BigRat(-2), BigRat(2));
    layer = gcd(layer, layer.derivative());
  }
  return at_plus_one + at_minus_one + 2 * in_interval;
}

bool is_hyperbolic(const TorusAutomorphism& map) { return count_unit_circle_roots(char_poly(map.matrix())) == 0; }

namespace {

Eigen::MatrixXd to_double(const IntMatrix& m) {
  const auto d = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d();
  return out;
}

// Orthonormal basis of ker prod_{z in roots} (S - z I), which is the real
// invariant subspace for that (conjugation-closed) group of eigenvalues.
Eigen::MatrixXd invariant_basis(const Eigen::MatrixXd& s, const std::vector<std::complex<double>>& roots) {
  const Eigen::Index d = s.rows();
  if (roots.empty()) return Eigen::MatrixXd(d, 0);
  Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd sc = s.cast<std::complex<double>>();
  for (const auto& z : roots) {
    prod = prod * (sc - z * Eigen::MatrixXcd::Identity(d, d));
    const double scale = prod.cwiseAbs().maxCoeff();
    if (scale > 0) prod /= scale;
  }
  const Eigen::MatrixXd real = prod.real();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real, Eigen::ComputeFullV);
  const auto k = static_cast<Eigen::Index>(roots.size());
  return svd.matrixV().rightCols(k);
}

double subspace_residual(const Eigen::MatrixXd& s, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return 0.0;
  const Eigen::MatrixXd image = s * basis;
  const Eigen::MatrixXd projected = basis * (basis.transpose() * image);
  return (image - projected).norm() / s.norm();
}

}  // namespace

SpectralSplit stable_splitting(const TorusAutomorphism& map, double tol) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  SpectralSplit split;
  split.tolerance = tol;
  const int d = static_cast<int>(map.dim());
  split.d_e = count_unit_circle_roots(char_poly(map.matrix()));

  const Eigen::MatrixXd s = to_double(map.matrix());
  Eigen::EigenSolver<Eigen::MatrixXd> solver(s, false);
  if (solver.info() != Eigen::Success) throw Error(Errc::InternalInconsistency, "eigenvalue iteration did not converge");
  for (Eigen::Index i = 0; i < s.rows(); ++i) split.roots.push_back(solver.eigenvalues()[i]);
  std::sort(split.roots.begin(), split.roots.end(), [](auto a, auto b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  std::vector<std::complex<double>> unstable, neutral, stable;
  for (const auto& z : split.roots) {
    const double mod = std::abs(z);
    if (mod > 1.0 + tol) {
      unstable.push_back(z);
    } else if (mod < 1.0 - tol) {
      stable.push_back(z);
    } else {
      neutral.push_back(z);
    }
  }
  if (static_cast<int>(neutral.size()) != split.d_e)
    throw Error(Errc::ToleranceConflict, std::to_string(neutral.size()) + " numerical roots within tolerance of the unit circle, exact count is " +
                                             std::to_string(split.d_e));
  split.d_u = static_cast<int>(unstable.size());
  split.d_s = d - split.d_u - split.d_e;
  if (split.d_s != static_cast<int>(stable.size())) throw Error(Errc::InternalInconsistency, "root classification does not sum to d");
  if (!unstable.empty()) {
    double min_mod = std::abs(unstable.front());
    for (const auto& z : unstable) min_mod = std::min(min_mod, std::abs(z));
    split.r_u = 1.0 / min_mod;
  }
  split.basis_u = invariant_basis(s, unstable);
  split.basis_e = invariant_basis(s, neutral);
  split.basis_s = invariant_basis(s, stable);
  split.residual_u = subspace_residual(s, split.basis_u);
  split.residual_e = subspace_residual(s, split.basis_e);
  split.residual_s = subspace_residual(s, split.basis_s);
  return split;
}

}  // namespace toral
