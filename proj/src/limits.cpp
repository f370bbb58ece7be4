#include "toral/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toral/error.hpp"
#include "toral/kernels.hpp"
#include "toral/parallel.hpp"
#include "toral/series.hpp"

namespace toral {

namespace {

void check_length(std::size_t L, std::size_t K) {
  if (L < 2 || L < 10 * K)
    throw Error(Errc::InsufficientLength, "orbit length " + std::to_string(L) + " is below 10 K = " + std::to_string(10 * K));
}

// Corrected two-pass mean, so a constant vector centers to exact zeros.
void center(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = kernels::sum(v) / n;
  double residual = 0.0;
  for (double x : v) residual += x - mean;
  mean += residual / n;
  for (double& x : v) x -= mean;
}

// Lag-k cross covariance of centered vectors, normalized by L - k.
double lag_cov(const std::vector<double>& a, const std::vector<double>& b, std::size_t k) {
  const std::size_t m = a.size() - k;
  return kernels::dot(std::span<const double>(a.data(), m), std::span<const double>(b.data() + k, m)) / static_cast<double>(m);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<double> scalar_values(const SampleSeries& s) {
  if (s.ell() != 1) throw Error(Errc::UnsupportedDimension, "scalar observable required");
  return s.values();
}

std::vector<SampleSeries> sample_orbits(const TorusAutomorphism& map, const Observable& f, const OrbitSampling& sampling) {
  return orbit_replicates(map, f, sampling.orbit_length, sampling.n_orbits, sampling.seed, sampling.q);
}

}  // namespace

LongRunEstimate long_run_covariance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, std::size_t K) {
  if (a.empty() || a.size() != b.size()) throw Error(Errc::InvalidArgument, "need the same positive number of series on both sides");
  const std::size_t L = a.front().size();
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r].size() != L || b[r].size() != L) throw Error(Errc::InvalidArgument, "all series must share one length");
  check_length(L, K);

  const std::size_t R = a.size();
  // per_orbit[r * (K + 1) + k]: lag-k contribution on orbit r.
  std::vector<double> per_orbit(R * (K + 1));
  parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      auto x = a[r];
      auto y = b[r];
      center(x);
      center(y);
      per_orbit[r * (K + 1)] = lag_cov(x, y, 0);
      for (std::size_t k = 1; k <= K; ++k) per_orbit[r * (K + 1) + k] = lag_cov(x, y, k) + lag_cov(y, x, k);
    }
  });

  LongRunEstimate est;
  est.n_orbits = R;
  est.orbit_length = L;
  std::vector<double> column(R);
  for (std::size_t k = 0; k <= K; ++k) {
    for (std::size_t r = 0; r < R; ++r) column[r] = per_orbit[r * (K + 1) + k];
    const auto ms = mean_se(column);
    est.lag_terms.push_back(ms.mean);
    est.lag_standard_errors.push_back(ms.se);
  }
  for (std::size_t r = 0; r < R; ++r) {
    double total = 0.0;
    for (std::size_t k = 0; k <= K; ++k) total += per_orbit[r * (K + 1) + k];
    column[r] = total;
  }
  const auto ms = mean_se(column);
  est.value = ms.mean;
  est.standard_error = ms.se;
  return est;
}

std::vector<std::vector<double>> scalar_levels(const std::vector<double>& s_grid) {
  std::vector<std::vector<double>> levels;
  levels.reserve(s_grid.size());
  for (double s : s_grid) levels.push_back({s});
  return levels;
}

CovarianceGrid covariance_lambda(const std::vector<SampleSeries>& orbits, std::vector<std::vector<double>> levels, std::size_t K) {
  if (orbits.empty()) throw Error(Errc::InvalidArgument, "no orbits");
  if (levels.empty()) throw Error(Errc::InvalidArgument, "no levels");
  const std::size_t L = orbits.front().n();
  const std::size_t ell = orbits.front().ell();
  for (const auto& o : orbits)
    if (o.n() != L || o.ell() != ell) throw Error(Errc::InvalidArgument, "orbits must share length and dimension");
  for (const auto& s : levels)
    if (s.size() != ell) throw Error(Errc::InvalidArgument, "level has the wrong dimension");
  check_length(L, K);

  const std::size_t R = orbits.size();
  const std::size_t S = levels.size();
  const std::size_t pairs = S * (S + 1) / 2;
  // Per-orbit totals for each pair (i <= j) and diagonal lag terms.
  std::vector<double> totals(R * pairs);
  std::vector<double> diag(R * S * (K + 1));

  parallel_for(R, 1, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::vector<double>> ind(S, std::vector<double>(L));
    for (std::size_t r = lo; r < hi; ++r) {
      const auto& o = orbits[r];
      for (std::size_t j = 0; j < S; ++j) {
        for (std::size_t k = 0; k < L; ++k) {
          bool le = true;
          for (std::size_t c = 0; c < ell; ++c) le = le && o(k, c) <= levels[j][c];
          ind[j][k] = le ? 1.0 : 0.0;
        }
        center(ind[j]);
      }
      std::size_t idx = 0;
      for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = i; j < S; ++j, ++idx) {
          double total = lag_cov(ind[i], ind[j], 0);
          if (i == j) diag[(r * S + i) * (K + 1)] = total;
          for (std::size_t k = 1; k <= K; ++k) {
            const double term = lag_cov(ind[i], ind[j], k) + lag_cov(ind[j], ind[i], k);
            if (i == j) diag[(r * S + i) * (K + 1) + k] = term;
            total += term;
          }
          totals[r * pairs + idx] = total;
        }
      }
    }
  });

  CovarianceGrid grid;
  grid.levels = std::move(levels);
  grid.lag_cutoff = K;
  grid.n_orbits = R;
  grid.orbit_length = L;
  grid.estimates.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  grid.standard_errors.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  std::vector<double> column(R);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = i; j < S; ++j, ++idx) {
      for (std::size_t r = 0; r < R; ++r) column[r] = totals[r * pairs + idx];
      const auto ms = mean_se(column);
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      grid.estimates(a, b) = grid.estimates(b, a) = ms.mean;
      grid.standard_errors(a, b) = grid.standard_errors(b, a) = ms.se;
    }
  }
  grid.diag_lag_terms.resize(static_cast<Eigen::Index>(K + 1), static_cast<Eigen::Index>(S));
  grid.diag_lag_standard_errors.resize(static_cast<Eigen::Index>(K + 1), static_cast<Eigen::Index>(S));
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t k = 0; k <= K; ++k) {
      for (std::size_t r = 0; r < R; ++r) column[r] = diag[(r * S + i) * (K + 1) + k];
      const auto ms = mean_se(column);
      grid.diag_lag_terms(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = ms.mean;
      grid.diag_lag_standard_errors(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = ms.se;
    }
  }
  return grid;
}

CovarianceGrid covariance_lambda(const TorusAutomorphism& map, const Observable& f, std::vector<std::vector<double>> levels, std::size_t K,
                                 const OrbitSampling& sampling) {
  check_length(sampling.orbit_length, K);
  return covariance_lambda(sample_orbits(map, f, sampling), std::move(levels), K);
}

LongRunEstimate covariance_lambda_p(const std::vector<SampleSeries>& orbits, const std::function<double(double)>& g,
                                    const std::function<double(double)>& h, double M, std::size_t K, std::size_t grid_cells) {
  if (!(M > 0) || !std::isfinite(M)) throw Error(Errc::InvalidArgument, "support bound M must be positive");
  if (grid_cells < 1) throw Error(Errc::InvalidArgument, "need at least one grid cell");
  const double step = 2.0 * M / static_cast<double>(grid_cells);

  auto antiderivative = [&](const std::function<double(double)>& fn) {
    std::vector<double> G(grid_cells + 1, 0.0);
    double prev = fn(-M);
    for (std::size_t i = 1; i <= grid_cells; ++i) {
      const double cur = fn(-M + static_cast<double>(i) * step);
      G[i] = G[i - 1] + 0.5 * step * (prev + cur);
      prev = cur;
    }
    return G;
  };
  // int_{-M}^{M} g(s) 1{y <= s} ds = G(M) - G(max(y, -M)).
  auto transform = [&](const std::vector<double>& G, double y) {
    if (y <= -M) return G.back();
    if (y >= M) return 0.0;
    const double u = (y + M) / step;
    const auto i = std::min(grid_cells - 1, static_cast<std::size_t>(u));
    const double frac = u - static_cast<double>(i);
    return G.back() - (G[i] + frac * (G[i + 1] - G[i]));
  };

  const auto Gg = antiderivative(g);
  const auto Gh = antiderivative(h);
  std::vector<std::vector<double>> a, b;
  a.reserve(orbits.size());
  b.reserve(orbits.size());
  for (const auto& o : orbits) {
    const auto y = scalar_values(o);
    std::vector<double> va(y.size()), vb(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
      va[k] = transform(Gg, y[k]);
      vb[k] = transform(Gh, y[k]);
    }
    a.push_back(std::move(va));
    b.push_back(std::move(vb));
  }
  return long_run_covariance(a, b, K);
}

LongRunEstimate covariance_lambda_p(const TorusAutomorphism& map, const Observable& f, const std::function<double(double)>& g,
                                    const std::function<double(double)>& h, double M, std::size_t K, const OrbitSampling& sampling) {
  if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "Lambda_p is defined for scalar observables");
  check_length(sampling.orbit_length, K);
  return covariance_lambda_p(sample_orbits(map, f, sampling), g, h, M, K);
}

LongRunEstimate sigma_squared(const std::vector<SampleSeries>& orbits, std::size_t K) {
  std::vector<std::vector<double>> v;
  v.reserve(orbits.size());
  for (const auto& o : orbits) v.push_back(scalar_values(o));
  return long_run_covariance(v, v, K);
}

LongRunEstimate sigma_squared(const TorusAutomorphism& map, const Observable& f, std::size_t K, const OrbitSampling& sampling) {
  if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "sigma^2 is defined for scalar observables");
  check_length(sampling.orbit_length, K);
  return sigma_squared(sample_orbits(map, f, sampling), K);
}

namespace {

void check_ell_alpha(int ell, double alpha) {
  if (ell < 1) throw Error(Errc::DomainError, "ell must be a positive integer");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0, 1]");
}

}  // namespace

double k_function(int ell, double alpha, double p) {
  check_ell_alpha(ell, alpha);
  if (!(p > 2.0 * ell)) throw Error(Errc::DomainError, "k is defined for p > 2 ell only");
  const double first = p / (alpha * (p - 2.0 * ell));
  const double second = (p - 1.0) * (2.0 * alpha + p) / (p * alpha);
  return std::max(first, second);
}

CardanSolution cardan_p0(int ell, double alpha) {
  check_ell_alpha(ell, alpha);
  const double l = ell;
  CardanSolution s;
  // p^2 = (p - 1)(2 alpha + p)(p - 2 ell), expanded.
  s.b = -2.0 * l + 2.0 * alpha - 2.0;
  s.c = -4.0 * alpha * l + 2.0 * l - 2.0 * alpha;
  s.d = 4.0 * alpha * l;
  s.p_prime = -s.b * s.b / 3.0 + s.c;
  s.q = (s.b / 27.0) * (2.0 * s.b * s.b - 9.0 * s.c) + s.d;
  s.delta = s.q * s.q + (4.0 / 27.0) * s.p_prime * s.p_prime * s.p_prime;
  if (!(s.delta < 0.0)) throw Error(Errc::InternalInconsistency, "cubic discriminant is not negative");
  const double arg = std::clamp(-0.5 * s.q * std::sqrt(27.0 / -(s.p_prime * s.p_prime * s.p_prime)), -1.0, 1.0);
  s.p0 = 2.0 * (l + 1.0 - alpha) / 3.0 + 2.0 * std::sqrt(-s.p_prime / 3.0) * std::cos(std::acos(arg) / 3.0);
  s.residual = ((s.p0 + s.b) * s.p0 + s.c) * s.p0 + s.d;
  if (!(s.p0 > 2.0 * l && s.p0 < 4.0 * l)) throw Error(Errc::InternalInconsistency, "cubic root outside (2 ell, 4 ell)");
  return s;
}

ThresholdConstants a_constant(int ell, double alpha) {
  ThresholdConstants t;
  t.ell = ell;
  t.alpha = alpha;
  t.cubic = cardan_p0(ell, alpha);
  t.p1 = std::max(3.0, t.cubic.p0);
  t.a_value = k_function(ell, alpha, t.p1);

  const double l = ell;
  double lo = std::max(l + 2.0, 2.0 * l) + 1e-9 * l;
  double hi = 12.0 * l;
  const double domain_lo = lo;
  const double domain_hi = hi;
  t.grid_min = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 5; ++level) {
    const std::size_t points = level == 0 ? 200001 : 2001;
    const double step = (hi - lo) / static_cast<double>(points - 1);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
      const double v = k_function(ell, alpha, lo + static_cast<double>(i) * step);
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    if (best_value < t.grid_min) {
      t.grid_min = best_value;
      t.grid_argmin = lo + static_cast<double>(best) * step;
    }
    const double centre = lo + static_cast<double>(best) * step;
    lo = std::max(domain_lo, centre - step);
    hi = std::min(domain_hi, centre + step);
  }
  if (t.grid_min < t.a_value - 1e-6) throw Error(Errc::InternalInconsistency, "grid search found a value of k below a(ell, alpha)");
  return t;
}

}  // namespace toral
