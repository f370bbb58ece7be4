#pragma once

// Exact ergodicity / hyperbolicity decisions and the numerical
// stable-neutral-unstable splitting of an integer matrix.
//
// Everything that decides which side of the ergodic / hyperbolic dichotomy a
// matrix falls on is exact rational arithmetic. Only root moduli and
// invariant-subspace bases are floating point.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "toral/automorphism.hpp"
#include "toral/int_matrix.hpp"
#include "toral/polynomial.hpp"

namespace toral {

/// det(xI - m), monic, by the division-free Samuelson-Berkowitz recurrence.
IntPolynomial char_poly(const IntMatrix& m);

/// The m-th cyclotomic polynomial.
IntPolynomial cyclotomic(unsigned m);

unsigned euler_phi(unsigned m);

struct ErgodicityCertificate {
  bool ergodic = true;
  /// Indices m whose cyclotomic polynomial shares a factor with char(S).
  std::vector<unsigned> cyclotomic_factors;
  /// Largest m examined (2 d^2).
  unsigned searched_up_to = 0;
};

/// Ergodic iff gcd(char(S), Phi_m) = 1 over Q for every m <= 2 d^2 with
/// phi(m) <= d. phi(m) >= sqrt(m/2) makes the enumeration exhaustive.
ErgodicityCertificate is_ergodic(const TorusAutomorphism& map);
ErgodicityCertificate is_ergodic(const IntMatrix& m);

/// Exact number of roots (with multiplicity) on |z| = 1.
/// Throws ZeroConstantTerm if p(0) == 0.
int count_unit_circle_roots(const IntPolynomial& p);

bool is_hyperbolic(const TorusAutomorphism& map);

struct SpectralSplit {
  int d_u = 0;
  int d_e = 0;
  int d_s = 0;
  /// Spectral radius of S^{-1} on E_u; 0 when d_u == 0.
  double r_u = 0.0;
  /// Columns are orthonormal basis vectors (d x dim).
  Eigen::MatrixXd basis_u;
  Eigen::MatrixXd basis_e;
  Eigen::MatrixXd basis_s;
  /// ||S B - B (B^T S B)||_F / ||S||_F for each basis.
  double residual_u = 0.0;
  double residual_e = 0.0;
  double residual_s = 0.0;
  /// Numerical roots of char(S), sorted by modulus.
  std::vector<std::complex<double>> roots;
  double tolerance = 1e-9;
};

/// d_e from the exact counter; roots, d_u, r_u and bases from Eigen's real
/// Hessenberg-QR eigenvalues. Throws ToleranceConflict when the number of
/// numerical roots within tol of the unit circle differs from d_e.
SpectralSplit stable_splitting(const TorusAutomorphism& map, double tol = 1e-9);

}  // namespace toral
