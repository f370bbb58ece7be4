#pragma once

// Empirical distribution functions, the sequential empirical process
// S_[nt](s)/sqrt(n), its L^p norms in s, and Kantorovich distances on R.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "toral/observables.hpp"
#include "toral/rng.hpp"

namespace toral {

/// n observations of an R^ell-valued observable, row-major.
class SampleSeries {
 public:
  /// Throws InvalidArgument unless values.size() == n * ell, n >= 1 and
  /// every entry is finite.
  SampleSeries(std::size_t n, std::size_t ell, std::vector<double> values);
  static SampleSeries scalar(std::vector<double> values);

  std::size_t n() const noexcept { return n_; }
  std::size_t ell() const noexcept { return ell_; }
  double operator()(std::size_t k, std::size_t i) const { return values_[k * ell_ + i]; }
  std::span<const double> row(std::size_t k) const { return {values_.data() + k * ell_, ell_}; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double> component(std::size_t i) const;

  /// First m rows.
  SampleSeries prefix(std::size_t m) const;

 private:
  std::size_t n_;
  std::size_t ell_;
  std::vector<double> values_;
};

/// (1/n) #{k : x_k <= s componentwise}.
double empirical_cdf(const SampleSeries& series, std::span<const double> s);

struct CdfEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// F(s) from the observable's registered closed form (scalar observables only);
/// throws AnalyticUnavailable otherwise.
CdfEstimate reference_cdf_analytic(const Observable& f, std::span<const double> s);
/// F(s) by Monte Carlo over n uniform points, with its binomial standard error.
CdfEstimate reference_cdf_mc(const Observable& f, std::span<const double> s, std::size_t n, Rng& rng);

/// Multivariate reference distribution function F(s).
using MultiCdf = std::function<double(std::span<const double>)>;

/// Evaluates a one-dimensional CDF at s[0].
MultiCdf as_multi_cdf(const ReferenceCdf& cdf);
/// Product of marginal CDFs; exact only for independent components.
MultiCdf product_cdf(std::vector<ReferenceCdf> marginals);
/// Empirical CDF of f over n uniform points, frozen at construction.
MultiCdf monte_carlo_cdf(const Observable& f, std::size_t n, Rng& rng);

/// Values of S_[nt](s)/sqrt(n) on a (t, s) grid. The s grid is the Cartesian
/// product of per-component grids, flattened with the last component fastest.
struct EmpiricalProcessGrid {
  std::size_t n = 0;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> s_grids;
  /// values[ti * s_points + sj].
  std::vector<double> values;

  std::size_t s_points() const;
  /// Level vector of flattened s index j.
  std::vector<double> level(std::size_t j) const;
  double at(std::size_t ti, std::size_t sj) const { return values[ti * s_points() + sj]; }
};

/// Batch evaluation with prefix counts. Grids must be sorted, t in [0, 1].
EmpiricalProcessGrid sequential_process(const SampleSeries& series, std::vector<double> t_grid, std::vector<std::vector<double>> s_grids,
                                        const MultiCdf& cdf);

/// Streaming evaluation: samples are pushed one at a time and a row of the
/// process at the current time can be read out at any point. Agrees with
/// sequential_process bit for bit.
class SequentialProcessAccumulator {
 public:
  SequentialProcessAccumulator(std::size_t n, std::vector<std::vector<double>> s_grids, MultiCdf cdf);

  void push(std::span<const double> sample);
  std::size_t count() const noexcept { return m_; }
  /// S_m(s)/sqrt(n) at every flattened grid level.
  std::vector<double> row() const;

 private:
  std::size_t n_;
  std::size_t m_ = 0;
  std::vector<std::vector<double>> s_grids_;
  std::vector<std::vector<double>> levels_;
  std::vector<double> f_values_;
  std::vector<std::size_t> counts_;
};

/// Quantile grid: the sorted, deduplicated sample quantiles at `levels`
/// evenly spaced probabilities (i + 1/2)/levels, plus -M and M.
std::vector<double> default_s_grid(std::span<const double> samples, double M, std::size_t levels = 64);

/// max |x_k|, widened to cover the reference CDF's support when known, then
/// moved up by one ulp.
double default_support_bound(std::span<const double> samples, const ReferenceCdf& cdf);

/// Integral over [-M, M] of |S_m(s)|^p, S_m(s) = sum_{k<=m} 1{x_k <= s} - m F(s),
/// using the first m = prefix rows of a scalar series (prefix 0 means all).
/// Exact for piecewise-linear F; composite midpoint at F's quadrature step
/// otherwise. Throws UnsupportedDimension for ell > 1, InvalidArgument if
/// p < 1 or M < max |x_k|.
double lp_norm_in_s(const SampleSeries& series, const ReferenceCdf& cdf, double p, double M, std::size_t prefix = 0);

/// K(mu_n, mu) = integral of |F_n - F| over [-M, M]; equals
/// lp_norm_in_s(p = 1) / n exactly (same integral).
double kantorovich_continuous(const SampleSeries& series, const ReferenceCdf& cdf, double M);

/// Exact one-dimensional optimal transport cost with |x - y| between two
/// discrete measures. Throws WeightSumMismatch if a weight vector does not
/// sum to 1 within 1e-12.
double kantorovich_discrete(std::span<const double> weights1, std::span<const double> atoms1, std::span<const double> weights2,
                            std::span<const double> atoms2);

/// ||S_k||_{L^1} for k = 1..n (entry k-1).
std::vector<double> sequential_l1_profile(const SampleSeries& series, const ReferenceCdf& cdf, double M);

/// sup_k sqrt(n) K(mu_{n,k}, mu) = max_k ||S_k||_{L^1} / sqrt(n).
double sequential_kantorovich_sup(const SampleSeries& series, const ReferenceCdf& cdf, double M);

}  // namespace toral
