#pragma once

// Observables f: T^d -> R^ell with a regularity class, and Monte-Carlo lower
// estimates of their (directional) moduli of continuity.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "toral/rng.hpp"
#include "toral/spectral.hpp"

namespace toral {

struct TrigTerm {
  std::vector<int> k;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

namespace regularity {
struct TrigPoly {
  std::vector<TrigTerm> terms;
};
/// omega(f, delta) <= C delta^alpha.
struct Hoelder {
  double alpha = 1.0;
  double C = 1.0;
};
/// omega(f, delta) <= C |log delta|^{-a}.
struct LogModulus {
  double a = 1.0;
  double C = 1.0;
};
struct Custom {};
}  // namespace regularity

using Regularity = std::variant<regularity::TrigPoly, regularity::Hoelder, regularity::LogModulus, regularity::Custom>;

/// A one-dimensional distribution function.
///
/// Either piecewise linear through (knot, value) pairs with flat extension
/// (repeated knots encode jumps; evaluation is right-continuous), or an
/// arbitrary callable together with the quadrature step to use for it.
class ReferenceCdf {
 public:
  static ReferenceCdf piecewise_linear(std::vector<double> knots, std::vector<double> values);
  static ReferenceCdf callable(std::function<double(double)> cdf, double quadrature_step);

  double operator()(double s) const;

  bool is_piecewise_linear() const noexcept { return !fn_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double quadrature_step() const noexcept { return step_; }

  /// Interval outside which F is 0 or 1, if known. Piecewise-linear CDFs
  /// report their first and last knots.
  std::optional<std::pair<double, double>> support() const;
  ReferenceCdf& with_support(double lo, double hi);

 private:
  std::optional<std::pair<double, double>> support_;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::function<double(double)> fn_;
  double step_ = 0.0;
};

class Observable {
 public:
  using EvalFn = std::function<void(std::span<const double> x, std::span<double> out)>;

  Observable(std::size_t dim, std::size_t ell, EvalFn eval, Regularity reg, std::optional<std::vector<double>> known_mean = std::nullopt);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t ell() const noexcept { return ell_; }
  const Regularity& regularity() const noexcept { return reg_; }
  const std::optional<std::vector<double>>& known_mean() const noexcept { return known_mean_; }

  /// x has dim() coordinates in [0, 1); out has ell() entries.
  void eval(std::span<const double> x, std::span<double> out) const { eval_(x, out); }
  /// ell() == 1 shortcut.
  double eval_scalar(std::span<const double> x) const;

  /// Points where the variation of f concentrates; used by the modulus
  /// estimators to seed pairs.
  const std::vector<std::vector<double>>& extremal_points() const noexcept { return extremal_; }
  Observable& with_extremal_points(std::vector<std::vector<double>> points);

  /// Closed-form distribution function of the (scalar) observable, if registered.
  const std::optional<ReferenceCdf>& analytic_cdf() const noexcept { return cdf_; }
  Observable& with_analytic_cdf(ReferenceCdf cdf);

  /// Configuration object this observable was built from (may be null).
  const nlohmann::json& spec() const noexcept { return spec_; }
  Observable& with_spec(nlohmann::json spec);

 private:
  std::size_t dim_;
  std::size_t ell_;
  EvalFn eval_;
  Regularity reg_;
  std::optional<std::vector<double>> known_mean_;
  std::vector<std::vector<double>> extremal_;
  std::optional<ReferenceCdf> cdf_;
  nlohmann::json spec_;
};

/// Sup-norm distance on the torus.
double torus_distance(std::span<const double> x, std::span<const double> y);

/// f(x) = sum_k a_k cos(2 pi <k, x>) + b_k sin(2 pi <k, x>). Known mean is the
/// cosine coefficient of k = 0. A single non-constant term registers its
/// arcsine-law distribution function.
Observable trig_poly(std::size_t dim, std::vector<TrigTerm> terms);

/// f(x) = (1 + |log d(x, anchor)|)^{-a}, f(anchor) = 0 by continuity.
/// Tagged LogModulus(a, C).
Observable log_modulus_example(double a, std::vector<double> anchor, double C = 1.0);

/// f(x) = C d(x, anchor)^alpha, which is Hoelder(alpha, C) for alpha in (0, 1].
Observable hoelder_example(double alpha, std::vector<double> anchor, double C = 1.0);

/// f(x) = x_index; uniform marginal. Discontinuous on the torus, so tagged Custom.
Observable coordinate(std::size_t dim, std::size_t index);

Observable constant(std::size_t dim, double value);

/// (f_1, ..., f_ell) from scalar observables on the same torus. The
/// regularity is the weakest among the components.
Observable stack(std::vector<Observable> components);

/// Builds an observable from its configuration object, e.g.
/// {"type":"trig","terms":[{"k":[1,0],"cos":1.0}]} or
/// {"type":"log_modulus","a":2.0,"anchor":[0.3,0.7]}. Also accepts "hoelder",
/// "coordinate", "constant" and "stack". Throws ConfigError.
Observable observable_from_json(const nlohmann::json& spec, std::size_t dim);

struct ModulusEstimate {
  double value = 0.0;
  std::size_t n_pairs = 0;
  /// Always true: the maximum over sampled pairs never exceeds the true sup.
  bool lower_bound = true;
};

/// max over pairs of |f(x) - f(x + h)|_inf with h uniform in the sup-norm
/// ball of radius delta. With extremal points present, half the pairs start
/// exactly at one of them and the rest start uniformly. 0 < delta < 1/2.
ModulusEstimate modulus_estimate(const Observable& f, double delta, std::size_t n_pairs, Rng& rng);

enum class Direction { Unstable, StableNeutral };

/// As modulus_estimate, with h drawn from the ball of radius delta inside the
/// requested invariant subspace (h = h_s + h_e with each part in its own ball
/// for StableNeutral). Throws MissingSubspace when that subspace is trivial.
ModulusEstimate directional_modulus_estimate(const Observable& f, const SpectralSplit& split, Direction direction, double delta,
                                             std::size_t n_pairs, Rng& rng);

/// Log-log fits of modulus estimates against the logarithmic scale of delta.
struct ModulusDecayFit {
  std::vector<double> deltas;
  std::vector<double> estimates;
  /// Minus the OLS slope of log w against log(1 + |log delta|).
  double exponent = 0.0;
  /// Minus the OLS slope of log w against log |log delta|.
  double exponent_log_delta = 0.0;
};

/// Runs modulus_estimate at each delta (fresh child stream per delta) and fits
/// the decay exponent a of w(delta) ~ |log delta|^{-a}. Needs at least two
/// deltas and positive estimates.
ModulusDecayFit fit_modulus_decay(const Observable& f, std::vector<double> deltas, std::size_t n_pairs, Rng& rng);

struct MeanEstimate {
  std::vector<double> values;
  /// Zero for exact means.
  std::vector<double> standard_errors;
  std::size_t samples = 0;
};

/// Exact mean; throws ExactUnavailable without a known mean.
MeanEstimate mean_exact(const Observable& f);
/// Plain Monte-Carlo mean over n uniform points.
MeanEstimate mean_mc(const Observable& f, std::size_t n, Rng& rng);

}  // namespace toral
