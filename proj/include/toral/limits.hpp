#pragma once

// Limiting covariances of the empirical process and of partial sums, and the
// threshold constants a(ell, alpha) of the logarithmic-modulus hypothesis.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "toral/automorphism.hpp"
#include "toral/empirical.hpp"
#include "toral/observables.hpp"

namespace toral {

/// Sum over |k| <= K of lag covariances, averaged over independent orbits.
struct LongRunEstimate {
  double value = 0.0;
  /// Spread of the per-orbit estimates divided by sqrt(#orbits).
  double standard_error = 0.0;
  /// Contribution of lag k (k = 0..K; lags +-k combined), with its SE.
  std::vector<double> lag_terms;
  std::vector<double> lag_standard_errors;
  std::size_t n_orbits = 0;
  std::size_t orbit_length = 0;
};

/// Estimates sum_{|k|<=K} Cov(a_0, b_k) from paired series a[r], b[r] (one pair
/// per orbit). Each orbit is centered by its own mean and lag k is normalized
/// by L - k. Symmetric in (a, b). Throws InsufficientLength if L < 10 K or L < 2.
LongRunEstimate long_run_covariance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, std::size_t K);

struct OrbitSampling {
  std::size_t n_orbits = 64;
  std::size_t orbit_length = 16384;
  std::uint64_t seed = 0;
  BigInt q = default_denominator();
};

struct CovarianceGrid {
  /// Levels s_j (each of length ell).
  std::vector<std::vector<double>> levels;
  std::size_t lag_cutoff = 0;
  /// Exactly symmetric.
  Eigen::MatrixXd estimates;
  Eigen::MatrixXd standard_errors;
  /// Diagonal lag contributions: diag_lag_terms(k, j) for level j.
  Eigen::MatrixXd diag_lag_terms;
  Eigen::MatrixXd diag_lag_standard_errors;
  std::size_t n_orbits = 0;
  std::size_t orbit_length = 0;
};

/// Lambda(s, s') = sum_k Cov(1{f <= s}, 1{f o T^k <= s'}) from given orbit series.
CovarianceGrid covariance_lambda(const std::vector<SampleSeries>& orbits, std::vector<std::vector<double>> levels, std::size_t K);

/// As above with fresh orbits of (map, f).
CovarianceGrid covariance_lambda(const TorusAutomorphism& map, const Observable& f, std::vector<std::vector<double>> levels, std::size_t K,
                                 const OrbitSampling& sampling);

/// Convenience for scalar observables.
std::vector<std::vector<double>> scalar_levels(const std::vector<double>& s_grid);

/// Lambda_p(g, h) = sum_k Cov(int g(s) 1{f <= s} ds, int h(s) 1{f o T^k <= s} ds)
/// over s in [-M, M]. Each inner integral is G(M) - G(y) for an antiderivative G
/// tabulated by the trapezoid rule on `grid_cells` equal cells.
LongRunEstimate covariance_lambda_p(const std::vector<SampleSeries>& orbits, const std::function<double(double)>& g,
                                    const std::function<double(double)>& h, double M, std::size_t K, std::size_t grid_cells = 8192);

LongRunEstimate covariance_lambda_p(const TorusAutomorphism& map, const Observable& f, const std::function<double(double)>& g,
                                    const std::function<double(double)>& h, double M, std::size_t K, const OrbitSampling& sampling);

/// sigma^2(f) = Var f + 2 sum_{k>0} Cov(f, f o T^k), truncated at K.
LongRunEstimate sigma_squared(const std::vector<SampleSeries>& orbits, std::size_t K);
LongRunEstimate sigma_squared(const TorusAutomorphism& map, const Observable& f, std::size_t K, const OrbitSampling& sampling);

/// k_{ell,alpha}(p) = max(p / (alpha (p - 2 ell)), (p - 1)(2 alpha + p) / (p alpha)).
/// Throws DomainError if p <= 2 ell or alpha is outside (0, 1] or ell < 1.
double k_function(int ell, double alpha, double p);

/// Root of p^3 + b p^2 + c p + d = 0 in (2 ell, 4 ell), where the cubic is the
/// cross-multiplied balance of the two branches of k_{ell,alpha}.
struct CardanSolution {
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double p_prime = 0.0;
  double q = 0.0;
  double delta = 0.0;
  double p0 = 0.0;
  /// Cubic evaluated at p0.
  double residual = 0.0;
};

/// Depressed-cubic trigonometric solution. Throws InternalInconsistency if
/// delta >= 0 or p0 falls outside (2 ell, 4 ell).
CardanSolution cardan_p0(int ell, double alpha);

struct ThresholdConstants {
  int ell = 1;
  double alpha = 1.0;
  CardanSolution cubic;
  double p1 = 0.0;
  double a_value = 0.0;
  /// Independent check: minimum of k over a refined grid on
  /// [max(ell + 2, 2 ell) + 1e-9 ell, 12 ell].
  double grid_min = 0.0;
  double grid_argmin = 0.0;

  double k(double p) const { return k_function(ell, alpha, p); }
};

/// a(ell, alpha) = k_{ell,alpha}(max(3, p0)). Throws InternalInconsistency
/// when the grid minimum lies below a_value - 1e-6.
ThresholdConstants a_constant(int ell, double alpha);

}  // namespace toral
