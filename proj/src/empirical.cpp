#include "toral/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "toral/error.hpp"
#include "toral/kernels.hpp"
#include "toral/parallel.hpp"

namespace toral {

SampleSeries::SampleSeries(std::size_t n, std::size_t ell, std::vector<double> values) : n_(n), ell_(ell), values_(std::move(values)) {
  if (n_ < 1 || ell_ < 1) throw Error(Errc::InvalidArgument, "sample series needs n >= 1 and ell >= 1");
  if (values_.size() != n_ * ell_) throw Error(Errc::InvalidArgument, "sample series has the wrong number of values");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "sample series contains a non-finite value");
}

SampleSeries SampleSeries::scalar(std::vector<double> values) {
  const std::size_t n = values.size();
  return SampleSeries(n, 1, std::move(values));
}

std::vector<double> SampleSeries::component(std::size_t i) const {
  if (i >= ell_) throw Error(Errc::InvalidArgument, "component index out of range");
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = values_[k * ell_ + i];
  return out;
}

SampleSeries SampleSeries::prefix(std::size_t m) const {
  if (m < 1 || m > n_) throw Error(Errc::InvalidArgument, "prefix length out of range");
  return SampleSeries(m, ell_, std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(m * ell_)));
}

namespace {

bool dominated(std::span<const double> x, std::span<const double> s) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] <= s[i])) return false;
  return true;
}

// S_m(s)/sqrt(n); shared by the batch and streaming paths so both round identically.
double process_value(std::size_t count, std::size_t m, double f, std::size_t n) {
  return (static_cast<double>(count) - static_cast<double>(m) * f) / std::sqrt(static_cast<double>(n));
}

}  // namespace

double empirical_cdf(const SampleSeries& series, std::span<const double> s) {
  if (s.size() != series.ell()) throw Error(Errc::InvalidArgument, "level has the wrong dimension");
  std::size_t count = 0;
  if (series.ell() == 1) {
    count = kernels::count_le(series.values(), s[0]);
  } else {
    for (std::size_t k = 0; k < series.n(); ++k) count += dominated(series.row(k), s) ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(series.n());
}

CdfEstimate reference_cdf_analytic(const Observable& f, std::span<const double> s) {
  if (s.size() != f.ell()) throw Error(Errc::InvalidArgument, "level has the wrong dimension");
  if (f.ell() != 1 || !f.analytic_cdf()) throw Error(Errc::AnalyticUnavailable, "observable has no closed-form distribution function");
  return {(*f.analytic_cdf())(s[0]), 0.0};
}

CdfEstimate reference_cdf_mc(const Observable& f, std::span<const double> s, std::size_t n, Rng& rng) {
  if (s.size() != f.ell()) throw Error(Errc::InvalidArgument, "level has the wrong dimension");
  if (n < 1) throw Error(Errc::InvalidArgument, "Monte-Carlo sample size must be positive");
  std::vector<double> x(f.dim());
  std::vector<double> y(f.ell());
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (double& c : x) c = rng.uniform();
    f.eval(x, y);
    count += dominated(y, s) ? 1 : 0;
  }
  const double p = static_cast<double>(count) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

MultiCdf as_multi_cdf(const ReferenceCdf& cdf) {
  return [cdf](std::span<const double> s) { return cdf(s[0]); };
}

MultiCdf product_cdf(std::vector<ReferenceCdf> marginals) {
  if (marginals.empty()) throw Error(Errc::InvalidArgument, "product CDF needs at least one marginal");
  return [m = std::move(marginals)](std::span<const double> s) {
    double v = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) v *= m[i](s[i]);
    return v;
  };
}

MultiCdf monte_carlo_cdf(const Observable& f, std::size_t n, Rng& rng) {
  if (n < 1) throw Error(Errc::InvalidArgument, "Monte-Carlo sample size must be positive");
  const std::size_t ell = f.ell();
  auto table = std::make_shared<std::vector<double>>(n * ell);
  std::vector<double> x(f.dim());
  for (std::size_t k = 0; k < n; ++k) {
    for (double& c : x) c = rng.uniform();
    f.eval(x, std::span<double>(table->data() + k * ell, ell));
  }
  return [table, n, ell](std::span<const double> s) {
    std::size_t count = 0;
    if (ell == 1) {
      count = kernels::count_le(*table, s[0]);
    } else {
      for (std::size_t k = 0; k < n; ++k) count += dominated(std::span<const double>(table->data() + k * ell, ell), s) ? 1 : 0;
    }
    return static_cast<double>(count) / static_cast<double>(n);
  };
}

std::size_t EmpiricalProcessGrid::s_points() const {
  std::size_t total = 1;
  for (const auto& g : s_grids) total *= g.size();
  return total;
}

namespace {

std::vector<double> level_at(const std::vector<std::vector<double>>& grids, std::size_t j) {
  std::vector<double> s(grids.size());
  for (std::size_t i = grids.size(); i-- > 0;) {
    s[i] = grids[i][j % grids[i].size()];
    j /= grids[i].size();
  }
  return s;
}

void check_s_grids(const std::vector<std::vector<double>>& grids, std::size_t ell) {
  if (grids.size() != ell) throw Error(Errc::InvalidArgument, "need one s grid per component");
  for (const auto& g : grids) {
    if (g.empty()) throw Error(Errc::InvalidArgument, "empty s grid");
    if (!std::is_sorted(g.begin(), g.end())) throw Error(Errc::InvalidArgument, "s grid must be sorted");
  }
}

}  // namespace

std::vector<double> EmpiricalProcessGrid::level(std::size_t j) const { return level_at(s_grids, j); }

EmpiricalProcessGrid sequential_process(const SampleSeries& series, std::vector<double> t_grid, std::vector<std::vector<double>> s_grids,
                                        const MultiCdf& cdf) {
  check_s_grids(s_grids, series.ell());
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw Error(Errc::InvalidArgument, "t grid must be sorted");
  for (double t : t_grid)
    if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidArgument, "t grid must lie in [0, 1]");
  const std::size_t n = series.n();
  std::vector<std::size_t> stops(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    stops[i] = std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * t_grid[i])));

  EmpiricalProcessGrid grid;
  grid.n = n;
  grid.t_grid = std::move(t_grid);
  grid.s_grids = std::move(s_grids);
  const std::size_t points = grid.s_points();
  grid.values.assign(grid.t_grid.size() * points, 0.0);

  parallel_for(points, 16, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const auto s = level_at(grid.s_grids, j);
      const double f = cdf(s);
      std::size_t count = 0;
      std::size_t k = 0;
      for (std::size_t i = 0; i < stops.size(); ++i) {
        for (; k < stops[i]; ++k) count += dominated(series.row(k), s) ? 1 : 0;
        grid.values[i * points + j] = process_value(count, stops[i], f, n);
      }
    }
  });
  return grid;
}

SequentialProcessAccumulator::SequentialProcessAccumulator(std::size_t n, std::vector<std::vector<double>> s_grids, MultiCdf cdf)
    : n_(n), s_grids_(std::move(s_grids)) {
  if (n_ < 1) throw Error(Errc::InvalidArgument, "process length must be positive");
  check_s_grids(s_grids_, s_grids_.size());
  if (s_grids_.empty()) throw Error(Errc::InvalidArgument, "need at least one s grid");
  std::size_t points = 1;
  for (const auto& g : s_grids_) points *= g.size();
  levels_.reserve(points);
  f_values_.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    levels_.push_back(level_at(s_grids_, j));
    f_values_.push_back(cdf(levels_.back()));
  }
  counts_.assign(points, 0);
}

void SequentialProcessAccumulator::push(std::span<const double> sample) {
  if (sample.size() != s_grids_.size()) throw Error(Errc::InvalidArgument, "sample has the wrong dimension");
  if (m_ >= n_) throw Error(Errc::InvalidArgument, "accumulator already holds n samples");
  for (std::size_t j = 0; j < levels_.size(); ++j) counts_[j] += dominated(sample, levels_[j]) ? 1 : 0;
  ++m_;
}

std::vector<double> SequentialProcessAccumulator::row() const {
  std::vector<double> out(levels_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = process_value(counts_[j], m_, f_values_[j], n_);
  return out;
}

std::vector<double> default_s_grid(std::span<const double> samples, double M, std::size_t levels) {
  if (samples.empty()) throw Error(Errc::InvalidArgument, "no samples");
  if (levels < 1) throw Error(Errc::InvalidArgument, "need at least one quantile level");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid{-M, M};
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < levels; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(levels);
    const auto idx = std::min(sorted.size() - 1, static_cast<std::size_t>(std::floor(prob * n)));
    grid.push_back(sorted[idx]);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double default_support_bound(std::span<const double> samples, const ReferenceCdf& cdf) {
  double m = 0.0;
  for (double x : samples) m = std::max(m, std::abs(x));
  if (const auto sup = cdf.support()) m = std::max({m, std::abs(sup->first), std::abs(sup->second)});
  return std::nextafter(m, std::numeric_limits<double>::infinity());
}

namespace {

// A piece of [-M, M] on which the count N is constant and F is linear (or,
// for callable F, replaced by its midpoint value).
struct Cell {
  double left = 0.0;
  double width = 0.0;
  double f_lo = 0.0;  // F just right of the left end
  double f_hi = 0.0;  // F just left of the right end
};

struct CellLayout {
  std::vector<Cell> cells;
  bool midpoint = false;
};

// Linear piece of a piecewise-linear CDF containing the open interval (a, b);
// returns (F(a+), F(b-)). Every knot strictly inside [-M, M] is a breakpoint,
// so no knot lies in (a, b).
std::pair<double, double> linear_piece(const ReferenceCdf& cdf, double a, double b) {
  const auto& k = cdf.knots();
  const auto& v = cdf.values();
  if (a < k.front()) return {v.front(), v.front()};
  const auto j = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), a) - k.begin()) - 1;
  if (j + 1 == k.size()) return {v.back(), v.back()};
  const double slope = (v[j + 1] - v[j]) / (k[j + 1] - k[j]);
  return {v[j] + (a - k[j]) * slope, v[j] + (b - k[j]) * slope};
}

CellLayout build_cells(std::span<const double> samples, const ReferenceCdf& cdf, double M) {
  std::vector<double> bp(samples.begin(), samples.end());
  bp.push_back(-M);
  bp.push_back(M);
  if (cdf.is_piecewise_linear())
    for (double k : cdf.knots())
      if (k > -M && k < M) bp.push_back(k);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  CellLayout layout;
  layout.midpoint = !cdf.is_piecewise_linear();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i];
    const double b = bp[i + 1];
    if (!layout.midpoint) {
      const auto [lo, hi] = linear_piece(cdf, a, b);
      layout.cells.push_back({a, b - a, lo, hi});
      continue;
    }
    const double len = b - a;
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / cdf.quadrature_step())));
    const double h = len / static_cast<double>(pieces);
    for (std::size_t c = 0; c < pieces; ++c) {
      const double left = a + static_cast<double>(c) * h;
      const double f = cdf(left + 0.5 * h);
      layout.cells.push_back({left, h, f, f});
    }
  }
  return layout;
}

// Integral over a cell of width h of |g|^p with g linear from u to w.
double cell_integral(double u, double w, double h, double p) {
  const double au = std::abs(u);
  const double aw = std::abs(w);
  const bool crossing = (u > 0 && w < 0) || (u < 0 && w > 0);
  if (p == 1.0) {
    if (!crossing) return 0.5 * h * (au + aw);
    return h * (au * au + aw * aw) / (2.0 * (au + aw));
  }
  if (crossing) return h * (std::pow(au, p + 1.0) + std::pow(aw, p + 1.0)) / ((p + 1.0) * (au + aw));
  const double lo = std::min(au, aw);
  const double hi = std::max(au, aw);
  if (lo == hi) return h * std::pow(lo, p);
  if (lo == 0.0) return h * std::pow(hi, p) / (p + 1.0);
  // (hi^{p+1} - lo^{p+1}) / ((p+1)(hi-lo)) without cancellation.
  const double d = (hi - lo) / lo;
  return h * std::pow(lo, p) * std::expm1((p + 1.0) * std::log1p(d)) / ((p + 1.0) * d);
}

// sum over cells of the integral of |N_c - m F|^p; counts[c] is N on cell c.
double integrate_cells(const CellLayout& layout, const std::vector<double>& counts, double m, double p, std::vector<double>& scratch,
                       std::vector<double>& widths) {
  const auto& cells = layout.cells;
  scratch.resize(cells.size());
  if (layout.midpoint && p == 1.0) {
    widths.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      scratch[c] = counts[c] - m * cells[c].f_lo;
      widths[c] = cells[c].width;
    }
    return kernels::active().weighted_abs_sum(scratch.data(), widths.data(), cells.size());
  }
  for (std::size_t c = 0; c < cells.size(); ++c)
    scratch[c] = cell_integral(counts[c] - m * cells[c].f_lo, counts[c] - m * cells[c].f_hi, cells[c].width, p);
  return kernels::sum(scratch);
}

std::vector<double> cell_counts(const CellLayout& layout, std::vector<double> sorted) {
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> counts(layout.cells.size());
  std::size_t k = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    while (k < sorted.size() && sorted[k] <= layout.cells[c].left) ++k;
    counts[c] = static_cast<double>(k);
  }
  return counts;
}

void check_scalar_support(const SampleSeries& series, double M) {
  if (series.ell() != 1) throw Error(Errc::UnsupportedDimension, "integration in s is implemented for scalar observables only");
  double m = 0.0;
  for (double x : series.values()) m = std::max(m, std::abs(x));
  if (!(M >= m)) throw Error(Errc::InvalidArgument, "support bound M is smaller than max |sample|");
}

double lp_core(const SampleSeries& series, const ReferenceCdf& cdf, double p, double M, std::size_t m) {
  const std::span<const double> samples(series.values().data(), m);
  const auto layout = build_cells(samples, cdf, M);
  const auto counts = cell_counts(layout, std::vector<double>(samples.begin(), samples.end()));
  std::vector<double> scratch, widths;
  return integrate_cells(layout, counts, static_cast<double>(m), p, scratch, widths);
}

}  // namespace

double lp_norm_in_s(const SampleSeries& series, const ReferenceCdf& cdf, double p, double M, std::size_t prefix) {
  check_scalar_support(series, M);
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "p must be a finite number >= 1");
  if (prefix > series.n()) throw Error(Errc::InvalidArgument, "prefix exceeds the series length");
  return lp_core(series, cdf, p, M, prefix == 0 ? series.n() : prefix);
}

double kantorovich_continuous(const SampleSeries& series, const ReferenceCdf& cdf, double M) {
  check_scalar_support(series, M);
  return lp_core(series, cdf, 1.0, M, series.n()) / static_cast<double>(series.n());
}

double kantorovich_discrete(std::span<const double> weights1, std::span<const double> atoms1, std::span<const double> weights2,
                            std::span<const double> atoms2) {
  if (weights1.size() != atoms1.size() || weights2.size() != atoms2.size())
    throw Error(Errc::InvalidArgument, "weights and atoms must have equal lengths");
  if (atoms1.empty() || atoms2.empty()) throw Error(Errc::InvalidArgument, "empty measure");
  auto check = [](std::span<const double> w) {
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw Error(Errc::InvalidArgument, "weights must be finite and nonnegative");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(Errc::WeightSumMismatch, "weights do not sum to 1");
  };
  check(weights1);
  check(weights2);

  // Signed atoms: +w for the first measure, -w for the second. Integrate
  // |F1 - F2| between consecutive distinct atoms.
  std::vector<std::pair<double, double>> merged;
  merged.reserve(atoms1.size() + atoms2.size());
  for (std::size_t i = 0; i < atoms1.size(); ++i) merged.emplace_back(atoms1[i], weights1[i]);
  for (std::size_t i = 0; i < atoms2.size(); ++i) merged.emplace_back(atoms2[i], -weights2[i]);
  for (const auto& [x, w] : merged)
    if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "atoms must be finite");
  std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  double diff = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    diff += merged[i].second;
    if (i + 1 < merged.size()) cost += std::abs(diff) * (merged[i + 1].first - merged[i].first);
  }
  return cost;
}

std::vector<double> sequential_l1_profile(const SampleSeries& series, const ReferenceCdf& cdf, double M) {
  check_scalar_support(series, M);
  const auto& x = series.values();
  const auto layout = build_cells(x, cdf, M);
  std::vector<double> lefts(layout.cells.size());
  for (std::size_t c = 0; c < lefts.size(); ++c) lefts[c] = layout.cells[c].left;

  // Each step adds one sample: N grows by one on every cell at or right of it.
  std::vector<double> counts(layout.cells.size(), 0.0);
  std::vector<double> profile(series.n());
  std::vector<double> scratch, widths;
  for (std::size_t k = 0; k < series.n(); ++k) {
    const auto first = static_cast<std::size_t>(std::lower_bound(lefts.begin(), lefts.end(), x[k]) - lefts.begin());
    for (std::size_t c = first; c < counts.size(); ++c) counts[c] += 1.0;
    profile[k] = integrate_cells(layout, counts, static_cast<double>(k + 1), 1.0, scratch, widths);
  }
  return profile;
}

double sequential_kantorovich_sup(const SampleSeries& series, const ReferenceCdf& cdf, double M) {
  const auto profile = sequential_l1_profile(series, cdf, M);
  return *std::max_element(profile.begin(), profile.end()) / std::sqrt(static_cast<double>(series.n()));
}

}  // namespace toral
