#include "toral/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "toral/empirical.hpp"
#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/series.hpp"
#include "toral/spectral.hpp"

#ifndef TORAL_VERSION
#define TORAL_VERSION "unknown"
#endif

namespace toral {

using nlohmann::json;

std::string version_string() { return std::string("0.1.0+") + TORAL_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent streams derived from a report's master seed.
enum Stream : std::uint64_t { kReplicates = 0, kTarget = 1, kMean = 2, kCdf = 3 };

std::uint64_t stream(std::uint64_t seed, Stream s) { return Rng::split(seed, s); }

void require_ergodic(const TorusAutomorphism& map) {
  const auto cert = is_ergodic(map);
  if (!cert.ergodic) {
    std::string idx;
    for (unsigned m : cert.cyclotomic_factors) idx += (idx.empty() ? "" : ",") + std::to_string(m);
    throw Error(Errc::NotErgodic, "characteristic polynomial shares a factor with cyclotomic polynomial(s) " + idx);
  }
}

void require_dims(const TorusAutomorphism& map, const Observable& f) {
  if (map.dim() != f.dim()) throw Error(Errc::InvalidArgument, "observable and map dimensions differ");
}

struct ResolvedMean {
  double value = 0.0;
  bool exact = false;
};

ResolvedMean resolve_mean(const Observable& f, std::size_t samples, std::uint64_t seed) {
  if (f.known_mean()) return {f.known_mean()->front(), true};
  Rng rng(stream(seed, kMean));
  return {mean_mc(f, samples, rng).values.front(), false};
}

MultiCdf resolve_cdf(const Observable& f, std::size_t samples, std::uint64_t seed) {
  if (f.ell() == 1 && f.analytic_cdf()) return as_multi_cdf(*f.analytic_cdf());
  Rng rng(stream(seed, kCdf));
  return monte_carlo_cdf(f, samples, rng);
}

SampleSeries replicate_series(const TorusAutomorphism& map, const Observable& f, std::size_t n, std::uint64_t base, std::size_t r,
                              const BigInt& q) {
  Rng rng(Rng::split(base, r));
  return orbit_series(map, f, random_point(map.dim(), q, rng), n);
}

bool dominated(std::span<const double> x, const std::vector<double>& s) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] <= s[i])) return false;
  return true;
}

double normal_cdf(double x, double mean, double sd) { return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2)); }

struct Ols {
  double slope = kNaN;
  double se = kNaN;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Ols out;
  out.slope = sxy / sxx;
  if (x.size() > 2) {
    const double intercept = my - out.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - intercept - out.slope * x[i];
      ssr += r * r;
    }
    out.se = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return out;
}

json levels_json(const std::vector<std::vector<double>>& levels) {
  json out = json::array();
  for (const auto& s : levels) out.push_back(s);
  return out;
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double q = 0.0;
  if (lambda < 1.18) {
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-m * m * c);
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      q += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-300) break;
    }
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> values, double mean, double variance) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "no values to test");
  if (!(variance > 0.0)) throw Error(Errc::InvalidArgument, "target variance must be positive");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double sd = std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double F = normal_cdf(values[i], mean, sd);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

json to_json(const CltConfig& c) {
  return {{"mode", c.mode == CltMode::Indicator ? "indicator" : "partial_sum"},
          {"s", c.s},
          {"n", c.n},
          {"replicates", c.replicates},
          {"significance", c.significance},
          {"variance_band", c.variance_band},
          {"lag_cutoff", c.lag_cutoff},
          {"target_orbits", c.target_orbits},
          {"target_length", c.target_length},
          {"reference_samples", c.reference_samples},
          {"seed", c.seed},
          {"q", c.q.get_str()}};
}

CltReport evaluate_clt(std::vector<double> values, double target_variance, double significance, double variance_band) {
  if (values.size() < 2) throw Error(Errc::InvalidArgument, "need at least two replicate values");
  CltReport rep;
  rep.replicates = values.size();
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  rep.sample_mean = mean;
  rep.sample_variance = ss / (n - 1.0);
  rep.target_variance = target_variance;

  const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant && target_variance <= 0.0) {
    // Degenerate Gaussian limit: the data match it exactly, no test to run.
    rep.degenerate = true;
    rep.ks_statistic = 0.0;
    rep.ks_p_value = 1.0;
    rep.pass_ks = rep.pass_variance = rep.pass = true;
  } else if (target_variance <= 0.0) {
    rep.ks_statistic = 1.0;
    rep.ks_p_value = 0.0;
  } else {
    const auto ks = ks_test_normal(values, 0.0, target_variance);
    rep.ks_statistic = ks.statistic;
    rep.ks_p_value = ks.p_value;
    rep.pass_ks = ks.p_value > significance;
    rep.pass_variance = std::abs(rep.sample_variance / target_variance - 1.0) < variance_band;
    rep.pass = rep.pass_ks && rep.pass_variance;
  }
  rep.values = std::move(values);
  return rep;
}

CltReport clt_marginal_test(const TorusAutomorphism& map, const Observable& f, const CltConfig& config) {
  require_dims(map, f);
  require_ergodic(map);
  if (config.replicates < 2 || config.n < 1) throw Error(Errc::InvalidArgument, "need n >= 1 and at least two replicates");

  const std::size_t R = config.replicates;
  const double root_n = std::sqrt(static_cast<double>(config.n));
  std::vector<double> values(R);
  double target = 0.0, target_se = 0.0;
  OrbitSampling sampling{config.target_orbits, config.target_length, stream(config.seed, kTarget), config.q};
  const std::uint64_t base = stream(config.seed, kReplicates);

  if (config.mode == CltMode::Indicator) {
    if (config.s.size() != f.ell()) throw Error(Errc::InvalidArgument, "level s has the wrong dimension");
    const double F = resolve_cdf(f, config.reference_samples, config.seed)(config.s);
    parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        const auto series = replicate_series(map, f, config.n, base, r, config.q);
        std::size_t count = 0;
        for (std::size_t k = 0; k < series.n(); ++k) count += dominated(series.row(k), config.s) ? 1 : 0;
        values[r] = (static_cast<double>(count) - static_cast<double>(config.n) * F) / root_n;
      }
    });
    const auto grid = covariance_lambda(map, f, {config.s}, config.lag_cutoff, sampling);
    target = grid.estimates(0, 0);
    target_se = grid.standard_errors(0, 0);
  } else {
    if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "partial-sum mode needs a scalar observable");
    const double mean = resolve_mean(f, config.reference_samples, config.seed).value;
    parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        const auto series = replicate_series(map, f, config.n, base, r, config.q);
        double sum = 0.0;
        for (double v : series.values()) sum += v - mean;
        values[r] = sum / root_n;
      }
    });
    const auto est = sigma_squared(map, f, config.lag_cutoff, sampling);
    target = est.value;
    target_se = est.standard_error;
  }

  auto rep = evaluate_clt(std::move(values), target, config.significance, config.variance_band);
  rep.mode = config.mode;
  rep.n = config.n;
  rep.s = config.s;
  rep.target_standard_error = target_se;
  rep.seed = config.seed;
  rep.config = to_json(config);
  rep.version = version_string();
  return rep;
}

json to_json(const FddConfig& c) {
  return {{"s_list", levels_json(c.s_list)},
          {"n", c.n},
          {"replicates", c.replicates},
          {"lag_cutoff", c.lag_cutoff},
          {"target_orbits", c.target_orbits},
          {"target_length", c.target_length},
          {"reference_samples", c.reference_samples},
          {"frobenius_band", c.frobenius_band},
          {"time_ratio_lo", c.time_ratio_lo},
          {"time_ratio_hi", c.time_ratio_hi},
          {"seed", c.seed},
          {"q", c.q.get_str()}};
}

FddReport fdd_covariance_test(const TorusAutomorphism& map, const Observable& f, const FddConfig& config) {
  require_dims(map, f);
  require_ergodic(map);
  const std::size_t m = config.s_list.size();
  if (m < 1) throw Error(Errc::InvalidArgument, "need at least one level");
  for (const auto& s : config.s_list)
    if (s.size() != f.ell()) throw Error(Errc::InvalidArgument, "level has the wrong dimension");
  if (config.replicates < 2 || config.n < 2) throw Error(Errc::InvalidArgument, "need n >= 2 and at least two replicates");

  const auto cdf = resolve_cdf(f, config.reference_samples, config.seed);
  std::vector<double> F(m);
  for (std::size_t i = 0; i < m; ++i) F[i] = cdf(config.s_list[i]);

  const std::size_t R = config.replicates;
  const std::size_t half = config.n / 2;
  const double root_n = std::sqrt(static_cast<double>(config.n));
  // full[r * m + i] = S_n(s_i)/sqrt(n); mid[r * m + i] = S_[n/2](s_i)/sqrt(n).
  std::vector<double> full(R * m), mid(R * m);
  const std::uint64_t base = stream(config.seed, kReplicates);
  parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> counts(m);
    for (std::size_t r = lo; r < hi; ++r) {
      const auto series = replicate_series(map, f, config.n, base, r, config.q);
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t k = 0; k < config.n; ++k) {
        if (k == half)
          for (std::size_t i = 0; i < m; ++i)
            mid[r * m + i] = (static_cast<double>(counts[i]) - static_cast<double>(half) * F[i]) / root_n;
        for (std::size_t i = 0; i < m; ++i) counts[i] += dominated(series.row(k), config.s_list[i]) ? 1 : 0;
      }
      for (std::size_t i = 0; i < m; ++i) full[r * m + i] = (static_cast<double>(counts[i]) - static_cast<double>(config.n) * F[i]) / root_n;
    }
  });

  FddReport rep;
  rep.n = config.n;
  rep.replicates = R;
  rep.s_list = config.s_list;
  const auto M = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(R), M), Y(static_cast<Eigen::Index>(R), M);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < m; ++i) {
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = full[r * m + i];
      Y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = mid[r * m + i];
    }
  const Eigen::RowVectorXd mx = X.colwise().mean();
  const Eigen::RowVectorXd my = Y.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mx;
  const Eigen::MatrixXd Yc = Y.rowwise() - my;
  const double denom = static_cast<double>(R) - 1.0;
  rep.empirical_covariance = (Xc.transpose() * Xc) / denom;
  rep.empirical_covariance = 0.5 * (rep.empirical_covariance + rep.empirical_covariance.transpose()).eval();

  double cov_sum = 0.0, var_sum = 0.0;
  for (Eigen::Index i = 0; i < M; ++i) {
    const double cov = Xc.col(i).dot(Yc.col(i)) / denom;
    const double var = rep.empirical_covariance(i, i);
    rep.time_ratios.push_back(var > 0.0 ? cov / var : kNaN);
    cov_sum += cov;
    var_sum += var;
  }
  rep.time_ratio = var_sum > 0.0 ? cov_sum / var_sum : kNaN;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rep.empirical_covariance);
  for (Eigen::Index i = 0; i < M; ++i) rep.clipped_mass += std::max(0.0, -eig.eigenvalues()(i));

  OrbitSampling sampling{config.target_orbits, config.target_length, stream(config.seed, kTarget), config.q};
  const auto grid = covariance_lambda(map, f, config.s_list, config.lag_cutoff, sampling);
  rep.lambda_hat = grid.estimates;
  rep.lambda_standard_errors = grid.standard_errors;
  const double ref = rep.lambda_hat.norm();
  const double diff = (rep.empirical_covariance - rep.lambda_hat).norm();
  rep.relative_frobenius = ref > 0.0 ? diff / ref : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

  rep.pass_frobenius = rep.relative_frobenius < config.frobenius_band;
  rep.pass_time_ratio = rep.time_ratio >= config.time_ratio_lo && rep.time_ratio <= config.time_ratio_hi;
  rep.pass = rep.pass_frobenius && rep.pass_time_ratio;
  rep.seed = config.seed;
  rep.config = to_json(config);
  rep.version = version_string();
  return rep;
}

json to_json(const BirkhoffConfig& c) {
  return {{"n", c.n}, {"n_orbits", c.n_orbits}, {"reference_samples", c.reference_samples}, {"seed", c.seed}, {"q", c.q.get_str()}};
}

BirkhoffReport birkhoff_check(const TorusAutomorphism& map, const Observable& f, const BirkhoffConfig& config) {
  require_dims(map, f);
  require_ergodic(map);
  if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "Birkhoff check needs a scalar observable");
  if (config.n < 1 || config.n_orbits < 1) throw Error(Errc::InvalidArgument, "need n >= 1 and at least one orbit");

  BirkhoffReport rep;
  const auto mean = resolve_mean(f, config.reference_samples, config.seed);
  rep.target_mean = mean.value;
  rep.exact_mean = mean.exact;
  for (std::size_t div : {64u, 16u, 4u, 1u})
    if (config.n / div >= 1 && (rep.n_list.empty() || rep.n_list.back() < config.n / div)) rep.n_list.push_back(config.n / div);

  const std::size_t L = rep.n_list.size();
  const std::size_t R = config.n_orbits;
  std::vector<double> err(R * L);
  const std::uint64_t base = stream(config.seed, kReplicates);
  parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const auto series = replicate_series(map, f, config.n, base, r, config.q);
      double sum = 0.0;
      std::size_t next = 0;
      for (std::size_t k = 0; k < config.n; ++k) {
        sum += series.values()[k] - mean.value;
        if (k + 1 == rep.n_list[next]) {
          err[r * L + next] = sum / static_cast<double>(k + 1);
          ++next;
        }
      }
    }
  });

  for (std::size_t j = 0; j < L; ++j) {
    double s = 0.0, s2 = 0.0, mx = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double e = err[r * L + j];
      s += e;
      s2 += e * e;
      mx = std::max(mx, std::abs(e));
    }
    rep.mean_error.push_back(s / static_cast<double>(R));
    rep.rms_error.push_back(std::sqrt(s2 / static_cast<double>(R)));
    rep.max_abs_error.push_back(mx);
  }

  const bool vanishes = rep.rms_error.back() <= 1e-12;
  const bool positive = std::all_of(rep.rms_error.begin(), rep.rms_error.end(), [](double v) { return v > 0.0; });
  rep.rms_slope = kNaN;
  if (positive && L >= 2) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < L; ++j) {
      x.push_back(std::log(static_cast<double>(rep.n_list[j])));
      y.push_back(std::log(rep.rms_error[j]));
    }
    rep.rms_slope = ols(x, y).slope;
  }
  rep.converged = vanishes || (std::isfinite(rep.rms_slope) && rep.rms_slope < -0.25);
  rep.seed = config.seed;
  rep.config = to_json(config);
  rep.version = version_string();
  return rep;
}

json to_json(const ScalingConfig& c) {
  return {{"p", c.p},
          {"n_list", c.n_list},
          {"replicates", c.replicates},
          {"reference_samples", c.reference_samples},
          {"confidence", c.confidence},
          {"seed", c.seed},
          {"q", c.q.get_str()}};
}

ScalingReport moment_scaling(const SeriesSource& source, double mean, const ScalingConfig& config) {
  const auto& ns = config.n_list;
  if (ns.size() < 4) throw Error(Errc::InvalidArgument, "moment scaling needs at least four lengths");
  if (ns.front() < 1 || !std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end())
    throw Error(Errc::InvalidArgument, "lengths must be positive and strictly increasing");
  if (!(config.p >= 1.0)) throw Error(Errc::InvalidArgument, "moment order must be >= 1");
  if (config.replicates < 2) throw Error(Errc::InvalidArgument, "need at least two replicates");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) throw Error(Errc::InvalidArgument, "confidence must lie in (0, 1)");

  const std::size_t L = ns.size();
  const std::size_t R = config.replicates;
  std::vector<double> powered(R * L);
  parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const auto x = source(r, ns.back());
      if (x.size() < ns.back()) throw Error(Errc::InvalidArgument, "series source returned a short series");
      double sum = 0.0, run_max = 0.0;
      std::size_t next = 0;
      for (std::size_t k = 0; k < ns.back(); ++k) {
        sum += x[k] - mean;
        run_max = std::max(run_max, std::abs(sum));
        if (k + 1 == ns[next]) powered[r * L + next++] = std::pow(run_max, config.p);
      }
    }
  });

  ScalingReport rep;
  rep.p = config.p;
  rep.n_list = ns;
  for (std::size_t j = 0; j < L; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) s += powered[r * L + j];
    rep.moments.push_back(std::pow(s / static_cast<double>(R), 1.0 / config.p));
  }
  rep.degenerate = std::any_of(rep.moments.begin(), rep.moments.end(), [](double v) { return !(v > 0.0); });
  if (rep.degenerate) {
    rep.slope = rep.slope_ci_lo = rep.slope_ci_hi = kNaN;
    rep.warnings.push_back("moments vanish; slope undefined");
  } else {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < L; ++j) {
      x.push_back(std::log(static_cast<double>(ns[j])));
      y.push_back(std::log(rep.moments[j]));
    }
    const auto fit = ols(x, y);
    const boost::math::students_t t(static_cast<double>(L) - 2.0);
    const double crit = boost::math::quantile(t, 0.5 + 0.5 * config.confidence);
    rep.slope = fit.slope;
    rep.slope_ci_lo = fit.slope - crit * fit.se;
    rep.slope_ci_hi = fit.slope + crit * fit.se;
  }
  rep.seed = config.seed;
  rep.config = to_json(config);
  rep.version = version_string();
  return rep;
}

ScalingReport moment_scaling(const TorusAutomorphism& map, const Observable& f, const ScalingConfig& config) {
  require_dims(map, f);
  if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "moment scaling needs a scalar observable");
  const auto mean = resolve_mean(f, config.reference_samples, config.seed);
  const std::uint64_t base = stream(config.seed, kReplicates);
  const auto source = [&](std::size_t r, std::size_t length) { return replicate_series(map, f, length, base, r, config.q).values(); };
  auto rep = moment_scaling(source, mean.value, config);
  if (std::holds_alternative<regularity::Custom>(f.regularity()))
    rep.warnings.insert(rep.warnings.begin(), "RegularityUnknown: the moment condition cannot be checked for a custom observable");
  if (!mean.exact) rep.warnings.push_back("mean estimated by Monte Carlo; the centering error grows linearly in n");
  return rep;
}

SeriesSource gaussian_source(std::uint64_t seed) {
  return [seed](std::size_t r, std::size_t length) {
    Rng rng(Rng::split(seed, r));
    std::vector<double> x(length);
    for (double& v : x) v = rng.normal();
    return x;
  };
}

bool integral_condition_check(const Observable& f, const IntegralCondition& cond) {
  const auto& reg = f.regularity();
  if (std::holds_alternative<regularity::Custom>(reg))
    throw Error(Errc::RegularityUnknown, "custom observables carry no regularity class");
  if (const auto* e = std::get_if<condition::EmpLp>(&cond)) {
    if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "the L^p invariance principle is stated for scalar observables");
    if (!(e->p >= 1.0)) throw Error(Errc::InvalidArgument, "p must be >= 1");
  }
  const auto* lm = std::get_if<regularity::LogModulus>(&reg);
  if (!lm) return true;  // Hoelder and trigonometric observables beat any power of |log t|.
  const double a = lm->a;
  return std::visit(
      [&](const auto& c) -> bool {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, condition::EmpLp>) {
          return a > c.p - 1.0;
        } else if constexpr (std::is_same_v<C, condition::Kiefer>) {
          return a > a_constant(static_cast<int>(f.ell()), c.alpha).a_value;
        } else {
          return a > 0.5;
        }
      },
      cond);
}

LimitSamples sample_limit_process(const Eigen::MatrixXd& lambda, std::vector<double> t_grid, std::size_t n_paths, std::uint64_t seed) {
  if (lambda.rows() != lambda.cols() || lambda.rows() < 1) throw Error(Errc::InvalidArgument, "Lambda must be a non-empty square matrix");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw Error(Errc::InvalidArgument, "t grid must be sorted");
  for (double t : t_grid)
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidArgument, "t grid must lie in [0, 1]");

  const Eigen::MatrixXd sym = 0.5 * (lambda + lambda.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  LimitSamples out;
  out.trace = sym.trace();
  Eigen::VectorXd roots(sym.rows());
  for (Eigen::Index i = 0; i < sym.rows(); ++i) {
    const double ev = eig.eigenvalues()(i);
    out.clipped_mass += std::max(0.0, -ev);
    roots(i) = std::sqrt(std::max(0.0, ev));
  }
  if (out.clipped_mass > 0.0 && out.clipped_mass > 0.1 * std::abs(out.trace))
    throw Error(Errc::NotPSD, "negative eigenvalue mass exceeds 10% of the trace");
  const Eigen::MatrixXd root = eig.eigenvectors() * roots.asDiagonal();

  const std::size_t S = static_cast<std::size_t>(sym.rows());
  const std::size_t T = t_grid.size();
  out.t_grid = std::move(t_grid);
  out.s_points = S;
  out.n_paths = n_paths;
  out.paths.assign(n_paths * T * S, 0.0);
  parallel_for(n_paths, 64, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(S));
    Eigen::VectorXd state(static_cast<Eigen::Index>(S));
    for (std::size_t p = lo; p < hi; ++p) {
      Rng rng(Rng::split(seed, p));
      state.setZero();
      double prev = 0.0;
      for (std::size_t ti = 0; ti < T; ++ti) {
        const double dt = out.t_grid[ti] - prev;
        prev = out.t_grid[ti];
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        state += std::sqrt(dt) * (root * z);
        for (std::size_t j = 0; j < S; ++j) out.paths[(p * T + ti) * S + j] = state(static_cast<Eigen::Index>(j));
      }
    }
  });
  return out;
}

}  // namespace toral
