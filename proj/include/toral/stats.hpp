#pragma once

// Finite-sample checks of the limit theorems: marginal normality, the
// min(t, t') Lambda(s, s') covariance structure, Birkhoff averages, moment
// growth of running maxima, and sampling of the Gaussian limit itself.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "toral/automorphism.hpp"
#include "toral/limits.hpp"
#include "toral/observables.hpp"

namespace toral {

/// "<semver>+<git hash>".
std::string version_string();

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(sup |B| > lambda) for a Brownian bridge B.
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test against Normal(mean, variance), with
/// the p value from the asymptotic law at (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
KsResult ks_test_normal(std::vector<double> values, double mean, double variance);

enum class CltMode {
  /// n^{-1/2} S_n(s) at a level s; target Lambda(s, s).
  Indicator,
  /// n^{-1/2} sum (f o T^k - mean f); target sigma^2(f).
  PartialSum,
};

struct CltConfig {
  CltMode mode = CltMode::PartialSum;
  std::vector<double> s;
  std::size_t n = 4096;
  std::size_t replicates = 2000;
  double significance = 0.01;
  /// Pass requires |sample_variance / target_variance - 1| < variance_band.
  double variance_band = 0.1;
  std::size_t lag_cutoff = 30;
  std::size_t target_orbits = 64;
  std::size_t target_length = 16384;
  /// Monte-Carlo size for F(s) or the mean when no closed form is registered.
  std::size_t reference_samples = 1000000;
  std::uint64_t seed = 0;
  BigInt q = default_denominator();
};

nlohmann::json to_json(const CltConfig& c);

struct CltReport {
  CltMode mode = CltMode::PartialSum;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::vector<double> s;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double target_variance = 0.0;
  double target_standard_error = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  /// All values equal and target zero: nothing to test.
  bool degenerate = false;
  bool pass_ks = false;
  bool pass_variance = false;
  bool pass = false;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string version;
  std::vector<double> values;
};

/// Fills the statistics of a report from replicate values and a target.
CltReport evaluate_clt(std::vector<double> values, double target_variance, double significance, double variance_band);

/// Replicate r starts from a point drawn with split(split(seed, 0), r); the
/// target uses independent orbits drawn with split(split(seed, 1), r).
/// Throws NotErgodic.
CltReport clt_marginal_test(const TorusAutomorphism& map, const Observable& f, const CltConfig& config);

struct FddConfig {
  std::vector<std::vector<double>> s_list;
  std::size_t n = 4096;
  std::size_t replicates = 2000;
  std::size_t lag_cutoff = 30;
  std::size_t target_orbits = 64;
  std::size_t target_length = 16384;
  std::size_t reference_samples = 1000000;
  double frobenius_band = 0.15;
  double time_ratio_lo = 0.45;
  double time_ratio_hi = 0.55;
  std::uint64_t seed = 0;
  BigInt q = default_denominator();
};

nlohmann::json to_json(const FddConfig& c);

struct FddReport {
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::vector<std::vector<double>> s_list;
  /// Covariance of (S_n(s_i) / sqrt(n))_i across replicates.
  Eigen::MatrixXd empirical_covariance;
  Eigen::MatrixXd lambda_hat;
  Eigen::MatrixXd lambda_standard_errors;
  double relative_frobenius = 0.0;
  /// Sum_i Cov(S_[n/2](s_i), S_n(s_i)) / sum_i Var(S_n(s_i)).
  double time_ratio = 0.0;
  std::vector<double> time_ratios;
  /// Negative eigenvalue mass removed from the empirical covariance.
  double clipped_mass = 0.0;
  bool pass_frobenius = false;
  bool pass_time_ratio = false;
  bool pass = false;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string version;
};

/// Throws NotErgodic.
FddReport fdd_covariance_test(const TorusAutomorphism& map, const Observable& f, const FddConfig& config);

struct BirkhoffConfig {
  std::size_t n = 65536;
  std::size_t n_orbits = 64;
  std::size_t reference_samples = 1000000;
  std::uint64_t seed = 0;
  BigInt q = default_denominator();
};

nlohmann::json to_json(const BirkhoffConfig& c);

struct BirkhoffReport {
  double target_mean = 0.0;
  bool exact_mean = false;
  /// Prefix lengths n/64, n/16, n/4, n (those >= 1).
  std::vector<std::size_t> n_list;
  /// Mean and root-mean-square of the Birkhoff error across orbits per n.
  std::vector<double> mean_error;
  std::vector<double> rms_error;
  std::vector<double> max_abs_error;
  /// OLS slope of log rms against log n; NaN when the error vanishes.
  double rms_slope = 0.0;
  /// The error vanishes (rms <= 1e-12) or decays (slope < -0.25).
  bool converged = false;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string version;
};

/// Throws NotErgodic.
BirkhoffReport birkhoff_check(const TorusAutomorphism& map, const Observable& f, const BirkhoffConfig& config);

struct ScalingConfig {
  double p = 4.0;
  std::vector<std::size_t> n_list{256, 512, 1024, 2048, 4096, 8192, 16384};
  std::size_t replicates = 1000;
  std::size_t reference_samples = 1000000;
  /// Two-sided confidence level of the slope interval.
  double confidence = 0.95;
  std::uint64_t seed = 0;
  BigInt q = default_denominator();
};

nlohmann::json to_json(const ScalingConfig& c);

struct ScalingReport {
  double p = 0.0;
  std::vector<std::size_t> n_list;
  /// (E max_{k<=n} |sum_{i<=k} (x_i - mean)|^p)^{1/p}.
  std::vector<double> moments;
  double slope = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  /// All moments zero; the slope is undefined (NaN).
  bool degenerate = false;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string version;
};

/// Replicate r of the generic form reads source(r, n_max); the moments at
/// smaller n use prefixes of the same series.
using SeriesSource = std::function<std::vector<double>(std::size_t replicate, std::size_t length)>;
ScalingReport moment_scaling(const SeriesSource& source, double mean, const ScalingConfig& config);

/// Orbit series of a scalar observable. Adds a warning for Custom regularity.
ScalingReport moment_scaling(const TorusAutomorphism& map, const Observable& f, const ScalingConfig& config);

/// I.i.d. standard normal series; replicate r uses split(seed, r).
SeriesSource gaussian_source(std::uint64_t seed);

namespace condition {
/// L^p-valued invariance principle for the empirical process (ell = 1).
struct EmpLp {
  double p = 2.0;
};
/// Kiefer-process limit; alpha is the Hoelder order of the component
/// distribution functions.
struct Kiefer {
  double alpha = 1.0;
};
/// Moment bound for partial sums.
struct Moment {};
}  // namespace condition

using IntegralCondition = std::variant<condition::EmpLp, condition::Kiefer, condition::Moment>;

/// Decides the regularity hypothesis from the observable's tag. Hoelder and
/// trigonometric observables always satisfy it; LogModulus(a) needs a > p - 1
/// (EmpLp), a > a(ell, alpha) (Kiefer) or a > 1/2 (Moment), all strict.
/// Throws RegularityUnknown for Custom.
bool integral_condition_check(const Observable& f, const IntegralCondition& condition);

struct LimitSamples {
  std::vector<double> t_grid;
  std::size_t s_points = 0;
  std::size_t n_paths = 0;
  /// paths[(path * t_grid.size() + ti) * s_points + sj].
  std::vector<double> paths;
  double clipped_mass = 0.0;
  double trace = 0.0;

  double at(std::size_t path, std::size_t ti, std::size_t sj) const { return paths[(path * t_grid.size() + ti) * s_points + sj]; }
};

/// Gaussian process with covariance min(t, t') Lambda(s, s'): Brownian
/// increments in t mapped through a square root of the clipped Lambda-hat.
/// Throws NotPSD if the clipped negative mass exceeds 10% of the trace.
LimitSamples sample_limit_process(const Eigen::MatrixXd& lambda, std::vector<double> t_grid, std::size_t n_paths, std::uint64_t seed);

}  // namespace toral
