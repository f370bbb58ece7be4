#include "toral/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "toral/error.hpp"

namespace toral {

using nlohmann::json;

ReferenceCdf ReferenceCdf::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
  if (knots.empty() || knots.size() != values.size())
    throw Error(Errc::InvalidArgument, "piecewise-linear CDF needs matching, non-empty knots and values");
  if (!std::is_sorted(knots.begin(), knots.end())) throw Error(Errc::InvalidArgument, "CDF knots must be sorted");
  if (!std::is_sorted(values.begin(), values.end())) throw Error(Errc::InvalidArgument, "CDF values must be nondecreasing");
  ReferenceCdf cdf;
  cdf.knots_ = std::move(knots);
  cdf.values_ = std::move(values);
  return cdf;
}

ReferenceCdf ReferenceCdf::callable(std::function<double(double)> fn, double quadrature_step) {
  if (!fn) throw Error(Errc::InvalidArgument, "empty CDF callable");
  if (!(quadrature_step > 0)) throw Error(Errc::InvalidArgument, "quadrature step must be positive");
  ReferenceCdf cdf;
  cdf.fn_ = std::move(fn);
  cdf.step_ = quadrature_step;
  return cdf;
}

double ReferenceCdf::operator()(double s) const {
  if (fn_) return fn_(s);
  if (s < knots_.front()) return values_.front();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (i + 1 == knots_.size()) return values_.back();
  const double t = (s - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

std::optional<std::pair<double, double>> ReferenceCdf::support() const {
  if (support_) return support_;
  if (!fn_) return std::make_pair(knots_.front(), knots_.back());
  return std::nullopt;
}

ReferenceCdf& ReferenceCdf::with_support(double lo, double hi) {
  if (!(lo <= hi)) throw Error(Errc::InvalidArgument, "empty CDF support");
  support_ = std::make_pair(lo, hi);
  return *this;
}

Observable::Observable(std::size_t dim, std::size_t ell, EvalFn eval, Regularity reg, std::optional<std::vector<double>> known_mean)
    : dim_(dim), ell_(ell), eval_(std::move(eval)), reg_(std::move(reg)), known_mean_(std::move(known_mean)) {
  if (dim_ < 1) throw Error(Errc::InvalidArgument, "observable dimension must be positive");
  if (ell_ < 1) throw Error(Errc::InvalidArgument, "observable must have at least one component");
  if (!eval_) throw Error(Errc::InvalidArgument, "observable has no evaluation function");
  if (known_mean_ && known_mean_->size() != ell_) throw Error(Errc::InvalidArgument, "known mean has the wrong length");
}

double Observable::eval_scalar(std::span<const double> x) const {
  double out = 0.0;
  eval_(x, std::span<double>(&out, 1));
  return out;
}

Observable& Observable::with_extremal_points(std::vector<std::vector<double>> points) {
  for (const auto& p : points)
    if (p.size() != dim_) throw Error(Errc::InvalidArgument, "extremal point has the wrong dimension");
  extremal_ = std::move(points);
  return *this;
}

Observable& Observable::with_analytic_cdf(ReferenceCdf cdf) {
  if (ell_ != 1) throw Error(Errc::UnsupportedDimension, "analytic CDFs are registered for scalar observables only");
  cdf_ = std::move(cdf);
  return *this;
}

Observable& Observable::with_spec(json spec) {
  spec_ = std::move(spec);
  return *this;
}

double torus_distance(std::span<const double> x, std::span<const double> y) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = x[i] - y[i];
    t -= std::round(t);
    best = std::max(best, std::fabs(t));
  }
  return best;
}

Observable trig_poly(std::size_t dim, std::vector<TrigTerm> terms) {
  double dc = 0.0;
  for (const auto& t : terms) {
    if (t.k.size() != dim) throw Error(Errc::InvalidArgument, "frequency vector has the wrong dimension");
    if (std::all_of(t.k.begin(), t.k.end(), [](int v) { return v == 0; })) dc += t.cos_coeff;
  }
  auto eval = [terms, dim](std::span<const double> x, std::span<double> out) {
    double acc = 0.0;
    for (const auto& t : terms) {
      double phase = 0.0;
      for (std::size_t i = 0; i < dim; ++i) phase += t.k[i] * x[i];
      phase = 2.0 * std::numbers::pi * (phase - std::floor(phase));
      if (t.cos_coeff != 0.0) acc += t.cos_coeff * std::cos(phase);
      if (t.sin_coeff != 0.0) acc += t.sin_coeff * std::sin(phase);
    }
    out[0] = acc;
  };
  Observable f(dim, 1, eval, regularity::TrigPoly{terms}, std::vector<double>{dc});

  // A single non-constant term c0 + A cos(2 pi <k,x> + phi) has the law of
  // c0 + A cos(2 pi U) with U uniform: F(s) = 1 - arccos((s - c0) / A) / pi.
  std::vector<const TrigTerm*> active;
  for (const auto& t : terms)
    if (std::any_of(t.k.begin(), t.k.end(), [](int v) { return v != 0; }) && (t.cos_coeff != 0.0 || t.sin_coeff != 0.0)) active.push_back(&t);
  if (active.empty()) {
    f.with_analytic_cdf(ReferenceCdf::piecewise_linear({dc, dc}, {0.0, 1.0}));
  } else if (active.size() == 1) {
    const double amp = std::hypot(active.front()->cos_coeff, active.front()->sin_coeff);
    f.with_analytic_cdf(ReferenceCdf::callable(
        [dc, amp](double s) {
          const double u = (s - dc) / amp;
          if (u < -1.0) return 0.0;
          if (u >= 1.0) return 1.0;
          return 1.0 - std::acos(u) / std::numbers::pi;
        },
        amp * 1e-4)
                            .with_support(dc - amp, dc + amp));
  }
  json spec = {{"type", "trig"}, {"terms", json::array()}};
  for (const auto& t : terms) spec["terms"].push_back({{"k", t.k}, {"cos", t.cos_coeff}, {"sin", t.sin_coeff}});
  f.with_spec(std::move(spec));
  return f;
}

Observable log_modulus_example(double a, std::vector<double> anchor, double C) {
  if (!(a > 0)) throw Error(Errc::InvalidArgument, "log-modulus exponent must be positive");
  const std::size_t dim = anchor.size();
  auto eval = [a, anchor](std::span<const double> x, std::span<double> out) {
    const double r = torus_distance(x, anchor);
    out[0] = r == 0.0 ? 0.0 : std::pow(1.0 + std::fabs(std::log(r)), -a);
  };
  Observable f(dim, 1, eval, regularity::LogModulus{a, C});
  f.with_extremal_points({anchor});
  f.with_spec({{"type", "log_modulus"}, {"a", a}, {"anchor", anchor}, {"C", C}});
  return f;
}

Observable hoelder_example(double alpha, std::vector<double> anchor, double C) {
  if (!(alpha > 0 && alpha <= 1)) throw Error(Errc::InvalidArgument, "Hoelder exponent must lie in (0, 1]");
  const std::size_t dim = anchor.size();
  auto eval = [alpha, anchor, C](std::span<const double> x, std::span<double> out) {
    out[0] = C * std::pow(torus_distance(x, anchor), alpha);
  };
  Observable f(dim, 1, eval, regularity::Hoelder{alpha, C});
  f.with_extremal_points({anchor});
  f.with_spec({{"type", "hoelder"}, {"alpha", alpha}, {"anchor", anchor}, {"C", C}});
  return f;
}

Observable coordinate(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(Errc::InvalidArgument, "coordinate index out of range");
  auto eval = [index](std::span<const double> x, std::span<double> out) { out[0] = x[index] - std::floor(x[index]); };
  Observable f(dim, 1, eval, regularity::Custom{}, std::vector<double>{0.5});
  f.with_analytic_cdf(ReferenceCdf::piecewise_linear({0.0, 1.0}, {0.0, 1.0}));
  f.with_spec({{"type", "coordinate"}, {"index", index}, {"dim", dim}});
  return f;
}

Observable constant(std::size_t dim, double value) {
  auto eval = [value](std::span<const double>, std::span<double> out) { out[0] = value; };
  Observable f(dim, 1, eval, regularity::Hoelder{1.0, 0.0}, std::vector<double>{value});
  f.with_analytic_cdf(ReferenceCdf::piecewise_linear({value, value}, {0.0, 1.0}));
  f.with_spec({{"type", "constant"}, {"value", value}, {"dim", dim}});
  return f;
}

namespace {

double trig_lipschitz(const regularity::TrigPoly& t) {
  double lip = 0.0;
  for (const auto& term : t.terms) {
    double knorm = 0.0;
    for (int v : term.k) knorm += std::abs(v);
    lip += 2.0 * std::numbers::pi * knorm * (std::fabs(term.cos_coeff) + std::fabs(term.sin_coeff));
  }
  return lip;
}

// Weakest class: Custom < LogModulus < Hoelder; trig polynomials count as
// Lipschitz (Hoelder 1).
Regularity weakest(const std::vector<Observable>& parts) {
  bool custom = false;
  std::optional<regularity::LogModulus> log_mod;
  std::optional<regularity::Hoelder> hoelder;
  for (const auto& p : parts) {
    std::visit(
        [&](const auto& r) {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, regularity::Custom>) {
            custom = true;
          } else if constexpr (std::is_same_v<R, regularity::LogModulus>) {
            if (!log_mod) log_mod = r;
            log_mod->a = std::min(log_mod->a, r.a);
            log_mod->C = std::max(log_mod->C, r.C);
          } else {
            regularity::Hoelder h;
            if constexpr (std::is_same_v<R, regularity::TrigPoly>) {
              h = {1.0, trig_lipschitz(r)};
            } else {
              h = r;
            }
            if (!hoelder) hoelder = h;
            hoelder->alpha = std::min(hoelder->alpha, h.alpha);
            hoelder->C = std::max(hoelder->C, h.C);
          }
        },
        p.regularity());
  }
  if (custom) return regularity::Custom{};
  if (log_mod) return *log_mod;
  return *hoelder;
}

}  // namespace

Observable stack(std::vector<Observable> components) {
  if (components.empty()) throw Error(Errc::InvalidArgument, "stack of zero observables");
  const std::size_t dim = components.front().dim();
  std::vector<double> mean;
  bool all_known = true;
  json spec = {{"type", "stack"}, {"components", json::array()}};
  std::vector<std::vector<double>> extremal;
  for (const auto& c : components) {
    if (c.dim() != dim || c.ell() != 1) throw Error(Errc::InvalidArgument, "stack expects scalar observables of equal dimension");
    if (c.known_mean()) {
      mean.push_back(c.known_mean()->front());
    } else {
      all_known = false;
    }
    spec["components"].push_back(c.spec());
    extremal.insert(extremal.end(), c.extremal_points().begin(), c.extremal_points().end());
  }
  const Regularity reg = weakest(components);
  const std::size_t ell = components.size();
  auto eval = [components = std::move(components)](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < components.size(); ++i) out[i] = components[i].eval_scalar(x);
  };
  Observable f(dim, ell, std::move(eval), reg, all_known ? std::optional<std::vector<double>>(mean) : std::nullopt);
  f.with_extremal_points(std::move(extremal));
  f.with_spec(std::move(spec));
  return f;
}

namespace {

std::vector<double> read_point(const json& j, const char* key, std::size_t dim) {
  if (!j.contains(key) || !j[key].is_array()) throw Error(Errc::ConfigError, std::string("observable needs array field '") + key + "'");
  auto v = j[key].get<std::vector<double>>();
  if (v.size() != dim) throw Error(Errc::ConfigError, std::string("field '") + key + "' must have " + std::to_string(dim) + " entries");
  return v;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error(Errc::ConfigError, "unknown observable field '" + key + "'");
  }
}

}  // namespace

Observable observable_from_json(const json& spec, std::size_t dim) {
  try {
    if (!spec.is_object() || !spec.contains("type")) throw Error(Errc::ConfigError, "observable spec must be an object with a 'type'");
    const std::string type = spec.at("type").get<std::string>();
    if (type == "trig") {
      reject_unknown(spec, {"type", "terms"});
      std::vector<TrigTerm> terms;
      for (const auto& t : spec.at("terms")) {
        reject_unknown(t, {"k", "cos", "sin"});
        TrigTerm term;
        term.k = t.at("k").get<std::vector<int>>();
        if (term.k.size() != dim) throw Error(Errc::ConfigError, "frequency vector must have " + std::to_string(dim) + " entries");
        term.cos_coeff = t.value("cos", 0.0);
        term.sin_coeff = t.value("sin", 0.0);
        terms.push_back(std::move(term));
      }
      return trig_poly(dim, std::move(terms));
    }
    if (type == "log_modulus") {
      reject_unknown(spec, {"type", "a", "anchor", "C"});
      return log_modulus_example(spec.at("a").get<double>(), read_point(spec, "anchor", dim), spec.value("C", 1.0));
    }
    if (type == "hoelder") {
      reject_unknown(spec, {"type", "alpha", "anchor", "C"});
      return hoelder_example(spec.at("alpha").get<double>(), read_point(spec, "anchor", dim), spec.value("C", 1.0));
    }
    if (type == "coordinate") {
      reject_unknown(spec, {"type", "index", "dim"});
      return coordinate(dim, spec.at("index").get<std::size_t>());
    }
    if (type == "constant") {
      reject_unknown(spec, {"type", "value", "dim"});
      return constant(dim, spec.at("value").get<double>());
    }
    if (type == "stack") {
      reject_unknown(spec, {"type", "components"});
      std::vector<Observable> parts;
      for (const auto& c : spec.at("components")) parts.push_back(observable_from_json(c, dim));
      return stack(std::move(parts));
    }
    throw Error(Errc::ConfigError, "unknown observable type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("malformed observable spec: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    throw Error(Errc::ConfigError, e.what());
  }
}

namespace {

void wrap_into_unit(std::vector<double>& y) {
  for (double& v : y) {
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;
  }
}

double sup_gap(const Observable& f, const std::vector<double>& x, const std::vector<double>& y, std::vector<double>& fx,
               std::vector<double>& fy) {
  f.eval(x, fx);
  f.eval(y, fy);
  double gap = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) gap = std::max(gap, std::fabs(fx[i] - fy[i]));
  return gap;
}

template <typename Displacement>
ModulusEstimate run_pairs(const Observable& f, double delta, std::size_t n_pairs, Rng& rng, Displacement draw) {
  if (!(delta > 0 && delta < 0.5)) throw Error(Errc::InvalidArgument, "delta must lie in (0, 1/2)");
  const std::size_t d = f.dim();
  const auto& hints = f.extremal_points();
  std::vector<double> x(d), y(d), h(d), fx(f.ell()), fy(f.ell());
  ModulusEstimate est;
  est.n_pairs = n_pairs;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    if (!hints.empty() && p % 2 == 0) {
      x = hints[(p / 2) % hints.size()];
      wrap_into_unit(x);
    } else {
      for (auto& v : x) v = rng.uniform();
    }
    draw(h);
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h[i];
    wrap_into_unit(y);
    est.value = std::max(est.value, sup_gap(f, x, y, fx, fy));
  }
  return est;
}

// A vector of the subspace spanned by `basis`, scaled to sup norm u * delta
// with u uniform in [0, 1).
void draw_in_subspace(const Eigen::MatrixXd& basis, double delta, Rng& rng, Eigen::VectorXd& out) {
  const Eigen::Index k = basis.cols();
  Eigen::VectorXd c(k);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < k; ++i) c[i] = rng.uniform(-1.0, 1.0);
    out = basis * c;
    norm = out.cwiseAbs().maxCoeff();
  } while (norm == 0.0);
  out *= delta * rng.uniform() / norm;
}

}  // namespace

ModulusEstimate modulus_estimate(const Observable& f, double delta, std::size_t n_pairs, Rng& rng) {
  return run_pairs(f, delta, n_pairs, rng, [&](std::vector<double>& h) {
    for (auto& v : h) v = rng.uniform(-delta, delta);
  });
}

ModulusEstimate directional_modulus_estimate(const Observable& f, const SpectralSplit& split, Direction direction, double delta,
                                             std::size_t n_pairs, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  const bool unstable = direction == Direction::Unstable;
  if (unstable && split.d_u == 0) throw Error(Errc::MissingSubspace, "no unstable directions");
  if (!unstable && split.d_s + split.d_e == 0) throw Error(Errc::MissingSubspace, "no stable or neutral directions");
  if (split.basis_u.rows() != d || split.basis_e.rows() != d || split.basis_s.rows() != d)
    throw Error(Errc::InvalidArgument, "splitting and observable live on different tori");
  Eigen::VectorXd part(d), total(d);
  return run_pairs(f, delta, n_pairs, rng, [&](std::vector<double>& h) {
    total.setZero();
    if (unstable) {
      draw_in_subspace(split.basis_u, delta, rng, part);
      total += part;
    } else {
      if (split.d_s > 0) {
        draw_in_subspace(split.basis_s, delta, rng, part);
        total += part;
      }
      if (split.d_e > 0) {
        draw_in_subspace(split.basis_e, delta, rng, part);
        total += part;
      }
    }
    for (Eigen::Index i = 0; i < d; ++i) h[static_cast<std::size_t>(i)] = total[i];
  });
}

ModulusDecayFit fit_modulus_decay(const Observable& f, std::vector<double> deltas, std::size_t n_pairs, Rng& rng) {
  if (deltas.size() < 2) throw Error(Errc::InvalidArgument, "need at least two deltas");
  ModulusDecayFit fit;
  std::vector<double> x1, x2, y;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    Rng child = rng.child(i);
    const double w = modulus_estimate(f, deltas[i], n_pairs, child).value;
    if (!(w > 0.0)) throw Error(Errc::DomainError, "modulus estimate vanished; no decay to fit");
    fit.estimates.push_back(w);
    const double l = std::abs(std::log(deltas[i]));
    x1.push_back(std::log1p(l));
    x2.push_back(std::log(l));
    y.push_back(std::log(w));
  }
  auto slope = [&](const std::vector<double>& x) {
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
    return sxy / sxx;
  };
  fit.exponent = -slope(x1);
  fit.exponent_log_delta = -slope(x2);
  fit.deltas = std::move(deltas);
  return fit;
}

MeanEstimate mean_exact(const Observable& f) {
  if (!f.known_mean()) throw Error(Errc::ExactUnavailable, "observable has no closed-form mean");
  return {*f.known_mean(), std::vector<double>(f.ell(), 0.0), 0};
}

MeanEstimate mean_mc(const Observable& f, std::size_t n, Rng& rng) {
  if (n < 2) throw Error(Errc::InvalidArgument, "Monte-Carlo mean needs at least two samples");
  const std::size_t ell = f.ell();
  std::vector<double> x(f.dim()), v(ell), avg(ell, 0.0), m2(ell, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (auto& c : x) c = rng.uniform();
    f.eval(x, v);
    const double count = static_cast<double>(k + 1);
    for (std::size_t i = 0; i < ell; ++i) {
      const double diff = v[i] - avg[i];
      avg[i] += diff / count;
      m2[i] += diff * (v[i] - avg[i]);
    }
  }
  MeanEstimate out{avg, std::vector<double>(ell), n};
  for (std::size_t i = 0; i < ell; ++i) out.standard_errors[i] = std::sqrt(m2[i] / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

}  // namespace toral
