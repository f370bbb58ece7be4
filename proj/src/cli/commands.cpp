#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "toral/cli.hpp"
#include "toral/empirical.hpp"
#include "toral/error.hpp"
#include "toral/io.hpp"
#include "toral/limits.hpp"
#include "toral/parallel.hpp"
#include "toral/series.hpp"
#include "toral/spectral.hpp"
#include "toral/stats.hpp"

namespace toral::cli {

using nlohmann::json;

namespace {

BigInt parse_q(const std::string& text) {
  BigInt q;
  if (text.empty() || q.set_str(text, 10) != 0) throw Error(Errc::ConfigError, "q must be a decimal integer, got '" + text + "'");
  if (q < 2) throw Error(Errc::ConfigError, "q must be at least 2");
  return q;
}

TorusAutomorphism load_map(const RunConfig& c) { return TorusAutomorphism(parse_matrix(c.matrix)); }

Observable load_observable(const RunConfig& c, std::size_t dim) {
  if (c.observable.is_null()) {
    std::vector<int> k(dim, 0);
    k[0] = 1;
    return trig_poly(dim, {TrigTerm{k, 1.0, 0.0}});
  }
  return observable_from_json(c.observable, dim);
}

RationalTorusPoint start_point(const RunConfig& c, std::size_t dim, const BigInt& q) {
  if (c.start.empty()) {
    Rng rng(c.seed);
    return random_point(dim, q, rng);
  }
  if (c.start.size() != dim) throw Error(Errc::ConfigError, "start needs " + std::to_string(dim) + " numerators");
  std::vector<BigInt> nums;
  for (const auto& s : c.start) nums.push_back(bigint_from_json(json(s)));
  try {
    return RationalTorusPoint(q, std::move(nums));
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, e.what());
  }
}

// Scalar reference CDF: the closed form when registered, otherwise the
// empirical CDF of a Monte-Carlo sample integrated at a fine step.
struct ScalarReference {
  ReferenceCdf cdf;
  bool exact = false;
};

ScalarReference scalar_reference(const Observable& f, const RunConfig& c) {
  if (f.analytic_cdf()) return {*f.analytic_cdf(), true};
  Rng rng(Rng::split(c.seed, 3));
  auto sample = iid_series(f, c.reference_samples, rng).values();
  std::sort(sample.begin(), sample.end());
  const double lo = sample.front();
  const double hi = sample.back();
  const double n = static_cast<double>(sample.size());
  auto fn = [s = std::move(sample), n](double x) { return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) / n; };
  const double step = std::max(hi - lo, 1e-12) / 65536.0;
  auto cdf = ReferenceCdf::callable(std::move(fn), step);
  cdf.with_support(lo, hi);
  return {std::move(cdf), false};
}

MultiCdf multi_reference(const Observable& f, const RunConfig& c) {
  if (f.ell() == 1 && f.analytic_cdf()) return as_multi_cdf(*f.analytic_cdf());
  Rng rng(Rng::split(c.seed, 3));
  return monte_carlo_cdf(f, c.reference_samples, rng);
}

// Levels at the given probabilities of f's law, from an i.i.d. sample.
std::vector<std::vector<double>> quantile_levels(const Observable& f, const RunConfig& c, const std::vector<double>& probs) {
  if (f.ell() != 1) throw Error(Errc::ConfigError, "levels must be given explicitly (--s-list) for vector observables");
  Rng rng(Rng::split(c.seed, 4));
  auto sample = iid_series(f, 20000, rng).values();
  std::sort(sample.begin(), sample.end());
  std::vector<double> s;
  for (double p : probs) s.push_back(sample[std::min(sample.size() - 1, static_cast<std::size_t>(p * static_cast<double>(sample.size())))]);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return scalar_levels(s);
}

std::vector<std::vector<double>> configured_levels(const Observable& f, const RunConfig& c, const std::vector<double>& default_probs) {
  if (!c.s_list.empty()) return c.s_list;
  if (!c.s.empty()) {
    if (f.ell() == 1) return scalar_levels(c.s);
    return {c.s};
  }
  return quantile_levels(f, c, default_probs);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json context(const char* command, const RunConfig& c, const json& observable_spec) {
  return {{"command", command}, {"matrix", to_json(parse_matrix(c.matrix))}, {"observable", observable_spec}, {"seed", c.seed},
          {"version", version_string()}, {"run_config", to_json(c)}};
}

class Output {
 public:
  Output(std::ostream& out, std::string dir) : out_(out), dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  std::ostream& stdout_stream() { return out_; }
  void report(const std::string& name, const json& j) {
    out_ << j.dump(2) << '\n';
    file(name + ".json", j.dump(2) + "\n");
  }
  void file(const std::string& name, const std::string& content) {
    if (dir_.empty()) return;
    std::ofstream f(std::filesystem::path(dir_) / name);
    if (!f) throw Error(Errc::ConfigError, "cannot write to output directory " + dir_);
    f << content;
  }

 private:
  std::ostream& out_;
  std::string dir_;
};

void cmd_check(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto cp = char_poly(map.matrix());
  const auto cert = is_ergodic(map);
  const int de = count_unit_circle_roots(cp);
  const auto split = stable_splitting(map, c.tol);
  json moduli = json::array();
  for (const auto& z : split.roots) moduli.push_back(std::abs(z));
  json j = context("check", c, nullptr);
  j.erase("observable");
  j.erase("seed");
  j.update({{"det", map.det()},
            {"char_poly", to_json(cp)},
            {"char_poly_text", cp.to_string()},
            {"ergodic", {{"value", cert.ergodic}, {"cyclotomic_factors", cert.cyclotomic_factors}, {"searched_up_to", cert.searched_up_to}}},
            {"hyperbolic", de == 0},
            {"d_u", split.d_u},
            {"d_e", split.d_e},
            {"d_s", split.d_s},
            {"r_u", split.r_u},
            {"root_moduli", moduli},
            {"residuals", {{"u", split.residual_u}, {"e", split.residual_e}, {"s", split.residual_s}}},
            {"tolerance", split.tolerance}});
  o.report("check", j);
}

void cmd_orbit(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const BigInt q = parse_q(c.q);
  if (c.n < 1) throw Error(Errc::ConfigError, "n must be positive");
  const auto orbit = map.orbit(start_point(c, map.dim(), q), c.n);
  std::ostringstream csv;
  write_orbit_csv(csv, orbit);
  o.stdout_stream() << csv.str();
  o.file("orbit.csv", csv.str());
}

void cmd_empirical(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const BigInt q = parse_q(c.q);
  const auto f = load_observable(c, map.dim());
  if (c.n < 1) throw Error(Errc::ConfigError, "n must be positive");
  const auto series = orbit_series(map, f, start_point(c, map.dim(), q), c.n);
  std::vector<std::vector<double>> grids;
  for (std::size_t i = 0; i < f.ell(); ++i) {
    const auto comp = series.component(i);
    if (f.ell() == 1 && !c.s.empty()) {
      grids.push_back(c.s);
      continue;
    }
    double M = c.M;
    if (M <= 0.0) {
      const auto ref = f.ell() == 1 ? std::optional<ReferenceCdf>(scalar_reference(f, c).cdf) : std::nullopt;
      M = ref ? default_support_bound(comp, *ref) : default_support_bound(comp, ReferenceCdf::piecewise_linear({0.0}, {0.0}));
    }
    grids.push_back(default_s_grid(comp, M, c.s_levels));
  }
  const auto grid = sequential_process(series, c.t_grid, grids, multi_reference(f, c));
  std::ostringstream csv;
  write_process_csv(csv, grid);
  auto header = process_header(grid, c.seed, f.spec());
  header["version"] = version_string();
  header["run_config"] = to_json(c);
  o.stdout_stream() << "# " << header.dump() << '\n' << csv.str();
  o.file("process.json", header.dump(2) + "\n");
  o.file("process.csv", csv.str());
}

void cmd_kanto(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const BigInt q = parse_q(c.q);
  const auto f = load_observable(c, map.dim());
  if (f.ell() != 1) throw Error(Errc::UnsupportedDimension, "Kantorovich distances are computed for scalar observables");
  if (c.n < 1) throw Error(Errc::ConfigError, "n must be positive");
  const auto series = orbit_series(map, f, start_point(c, map.dim(), q), c.n);
  const auto ref = scalar_reference(f, c);
  const double M = c.M > 0.0 ? c.M : default_support_bound(series.values(), ref.cdf);
  const double K = kantorovich_continuous(series, ref.cdf, M);
  const double lp1 = lp_norm_in_s(series, ref.cdf, 1.0, M);
  const double sup = sequential_kantorovich_sup(series, ref.cdf, M);
  const double rn = std::sqrt(static_cast<double>(c.n));
  json j = context("kanto", c, f.spec());
  j.update({{"n", c.n},
            {"M", M},
            {"exact_reference", ref.exact},
            {"K", K},
            {"sqrt_n_K", rn * K},
            {"L1_norm_S_n", lp1},
            {"sup_k_sqrt_n_K", sup}});
  o.report("kanto", j);
}

OrbitSampling sampling_of(const RunConfig& c) { return {c.target_orbits, c.target_length, c.seed, parse_q(c.q)}; }

void cmd_covariance(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto f = load_observable(c, map.dim());
  const auto levels = configured_levels(f, c, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  const auto grid = covariance_lambda(map, f, levels, c.lag_cutoff, sampling_of(c));
  std::ostringstream csv;
  write_covariance_csv(csv, grid);
  json j = context("covariance", c, f.spec());
  j.update({{"levels", grid.levels},
            {"lag_cutoff", grid.lag_cutoff},
            {"n_orbits", grid.n_orbits},
            {"orbit_length", grid.orbit_length},
            {"estimates", matrix_json(grid.estimates)},
            {"standard_errors", matrix_json(grid.standard_errors)},
            {"diag_lag_terms", matrix_json(grid.diag_lag_terms)},
            {"diag_lag_standard_errors", matrix_json(grid.diag_lag_standard_errors)}});
  if (c.format == "csv") {
    o.stdout_stream() << csv.str();
    o.file("covariance.json", j.dump(2) + "\n");
  } else {
    o.report("covariance", j);
  }
  o.file("covariance.csv", csv.str());
}

void cmd_constants(const RunConfig& c, Output& o) {
  const auto t = a_constant(c.ell, c.alpha);
  const json j = {{"command", "constants"},
                  {"ell", t.ell},
                  {"alpha", t.alpha},
                  {"b", t.cubic.b},
                  {"c", t.cubic.c},
                  {"d", t.cubic.d},
                  {"p_prime", t.cubic.p_prime},
                  {"q", t.cubic.q},
                  {"delta", t.cubic.delta},
                  {"p0", t.cubic.p0},
                  {"cubic_residual", t.cubic.residual},
                  {"p1", t.p1},
                  {"a", t.a_value},
                  {"grid_min", t.grid_min},
                  {"grid_argmin", t.grid_argmin},
                  {"version", version_string()},
                  {"run_config", to_json(c)}};
  o.report("constants", j);
}

void cmd_clt(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto f = load_observable(c, map.dim());
  CltConfig cc;
  if (c.mode == "partial_sum") cc.mode = CltMode::PartialSum;
  else if (c.mode == "indicator") cc.mode = CltMode::Indicator;
  else throw Error(Errc::ConfigError, "mode must be 'partial_sum' or 'indicator'");
  if (cc.mode == CltMode::Indicator && c.s.empty()) throw Error(Errc::ConfigError, "indicator mode needs a level --s");
  cc.s = c.s;
  cc.n = c.n;
  cc.replicates = c.replicates;
  cc.significance = c.significance;
  cc.variance_band = c.variance_band;
  cc.lag_cutoff = c.lag_cutoff;
  cc.target_orbits = c.target_orbits;
  cc.target_length = c.target_length;
  cc.reference_samples = c.reference_samples;
  cc.seed = c.seed;
  cc.q = parse_q(c.q);
  const auto rep = clt_marginal_test(map, f, cc);
  json j = context("clt", c, f.spec());
  j.update({{"mode", c.mode},
            {"n", rep.n},
            {"replicates", rep.replicates},
            {"s", rep.s},
            {"sample_mean", rep.sample_mean},
            {"sample_variance", rep.sample_variance},
            {"target_variance", rep.target_variance},
            {"target_standard_error", rep.target_standard_error},
            {"variance_ratio", rep.target_variance > 0.0 ? rep.sample_variance / rep.target_variance : std::nan("")},
            {"ks_statistic", rep.ks_statistic},
            {"ks_p_value", rep.ks_p_value},
            {"degenerate", rep.degenerate},
            {"pass_ks", rep.pass_ks},
            {"pass_variance", rep.pass_variance},
            {"pass", rep.pass},
            {"config", rep.config}});
  o.report("clt", j);
  std::string csv = "replicate,value\n";
  for (std::size_t r = 0; r < rep.values.size(); ++r) csv += std::to_string(r) + "," + format_double(rep.values[r]) + "\n";
  o.file("clt_values.csv", csv);
}

void cmd_fdd(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto f = load_observable(c, map.dim());
  FddConfig fc;
  fc.s_list = configured_levels(f, c, {0.2, 0.4, 0.6, 0.8});
  fc.n = c.n;
  fc.replicates = c.replicates;
  fc.lag_cutoff = c.lag_cutoff;
  fc.target_orbits = c.target_orbits;
  fc.target_length = c.target_length;
  fc.reference_samples = c.reference_samples;
  fc.frobenius_band = c.frobenius_band;
  fc.seed = c.seed;
  fc.q = parse_q(c.q);
  const auto rep = fdd_covariance_test(map, f, fc);
  json j = context("fdd", c, f.spec());
  j.update({{"n", rep.n},
            {"replicates", rep.replicates},
            {"s_list", rep.s_list},
            {"empirical_covariance", matrix_json(rep.empirical_covariance)},
            {"lambda_hat", matrix_json(rep.lambda_hat)},
            {"lambda_standard_errors", matrix_json(rep.lambda_standard_errors)},
            {"relative_frobenius", rep.relative_frobenius},
            {"time_ratio", rep.time_ratio},
            {"time_ratios", rep.time_ratios},
            {"clipped_mass", rep.clipped_mass},
            {"pass_frobenius", rep.pass_frobenius},
            {"pass_time_ratio", rep.pass_time_ratio},
            {"pass", rep.pass},
            {"config", rep.config}});
  o.report("fdd", j);
}

void cmd_scaling(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto f = load_observable(c, map.dim());
  ScalingConfig sc;
  sc.p = c.p;
  sc.n_list = c.n_list;
  sc.replicates = c.replicates;
  sc.reference_samples = c.reference_samples;
  sc.seed = c.seed;
  sc.q = parse_q(c.q);
  const auto rep = moment_scaling(map, f, sc);
  json j = context("scaling", c, f.spec());
  j.update({{"p", rep.p},
            {"n_list", rep.n_list},
            {"moments", rep.moments},
            {"slope", rep.slope},
            {"slope_ci", {rep.slope_ci_lo, rep.slope_ci_hi}},
            {"degenerate", rep.degenerate},
            {"warnings", rep.warnings},
            {"config", rep.config}});
  o.report("scaling", j);
}

void cmd_birkhoff(const RunConfig& c, Output& o) {
  const auto map = load_map(c);
  const auto f = load_observable(c, map.dim());
  BirkhoffConfig bc;
  bc.n = c.n;
  bc.n_orbits = c.n_orbits;
  bc.reference_samples = c.reference_samples;
  bc.seed = c.seed;
  bc.q = parse_q(c.q);
  const auto rep = birkhoff_check(map, f, bc);
  json j = context("birkhoff", c, f.spec());
  j.update({{"target_mean", rep.target_mean},
            {"exact_mean", rep.exact_mean},
            {"n_list", rep.n_list},
            {"mean_error", rep.mean_error},
            {"rms_error", rep.rms_error},
            {"max_abs_error", rep.max_abs_error},
            {"rms_slope", rep.rms_slope},
            {"converged", rep.converged},
            {"config", rep.config}});
  o.report("birkhoff", j);
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::NotSquare:
    case Errc::DeterminantNotUnit:
    case Errc::InvalidArgument:
    case Errc::DomainError:
    case Errc::UnsupportedDimension:
    case Errc::InsufficientLength:
      return 2;
    default:
      return 1;
  }
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, "'" + tok + "' is not a number");
    }
  }
  return out;
}

// "a,b;c,d" -> {{a,b},{c,d}}
std::vector<std::vector<double>> parse_levels(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string level;
  while (std::getline(ss, level, ';')) out.push_back(parse_doubles(level));
  return out;
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, "config file " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path, observable_text, s_list_text;
  try {
    config_path = find_config_path(args);
    if (!config_path.empty()) cfg = load_config_file(config_path);
  } catch (const Error& e) {
    report_error(err, errc_name(e.code()), e.what());
    return 2;
  }

  CLI::App app{"Exact simulation and limit-theorem checks for ergodic torus automorphisms", "toral"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version_string());
  app.add_option("--config", config_path, "JSON configuration file (flags override it)");
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--out-dir", cfg.out_dir, "Also write reports and CSV files here (default $TORAL_OUT_DIR)");
  app.add_option("--seed", cfg.seed, "Master seed");

  auto add_map = [&](CLI::App* sub) { sub->add_option("--matrix", cfg.matrix, "Integer matrix, \"2,1;1,1\" or JSON rows"); };
  auto add_sim = [&](CLI::App* sub) {
    add_map(sub);
    sub->add_option("--observable", observable_text, "Observable as JSON (default cos(2 pi x1))");
    sub->add_option("--q", cfg.q, "Grid denominator");
  };
  auto add_target = [&](CLI::App* sub) {
    sub->add_option("--lag-cutoff", cfg.lag_cutoff, "Lag truncation K");
    sub->add_option("--target-orbits", cfg.target_orbits, "Independent orbits for covariance targets");
    sub->add_option("--target-length", cfg.target_length, "Length of each target orbit");
    sub->add_option("--reference-samples", cfg.reference_samples, "Monte-Carlo size for F or the mean without closed form");
  };

  auto* check = app.add_subcommand("check", "Ergodicity, hyperbolicity and spectral splitting of a matrix");
  add_map(check);
  check->add_option("--tol", cfg.tol, "Unit-circle tolerance for numerical roots");

  auto* orbit = app.add_subcommand("orbit", "Exact orbit dump (CSV)");
  add_map(orbit);
  orbit->add_option("--q", cfg.q, "Grid denominator");
  orbit->add_option("--n", cfg.n, "Number of steps");
  orbit->add_option("--start", cfg.start, "Start numerators (default: random)")->delimiter(',');

  auto* empirical = app.add_subcommand("empirical", "Sequential empirical process on a (t, s) grid");
  add_sim(empirical);
  empirical->add_option("--n", cfg.n, "Orbit length");
  empirical->add_option("--start", cfg.start, "Start numerators (default: random)")->delimiter(',');
  empirical->add_option("--t-grid", cfg.t_grid, "Times in [0, 1]")->delimiter(',');
  empirical->add_option("--s", cfg.s, "Level grid (scalar observables)")->delimiter(',');
  empirical->add_option("--s-levels", cfg.s_levels, "Quantile levels of the default grid");
  empirical->add_option("--M", cfg.M, "Support bound (0: from data)");

  auto* kanto = app.add_subcommand("kanto", "Kantorovich distance of the empirical measure");
  add_sim(kanto);
  kanto->add_option("--n", cfg.n, "Orbit length");
  kanto->add_option("--start", cfg.start, "Start numerators (default: random)")->delimiter(',');
  kanto->add_option("--M", cfg.M, "Support bound (0: from data)");
  kanto->add_option("--reference-samples", cfg.reference_samples, "Monte-Carlo size for F without closed form");

  auto* covariance = app.add_subcommand("covariance", "Lambda(s, s') estimate with standard errors");
  add_sim(covariance);
  add_target(covariance);
  covariance->add_option("--s", cfg.s, "Scalar levels")->delimiter(',');
  covariance->add_option("--s-list", s_list_text, "Levels \"s1;s2;...\", components separated by commas");
  covariance->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* constants = app.add_subcommand("constants", "Threshold constants a(ell, alpha)");
  constants->add_option("--ell", cfg.ell, "Observable dimension ell");
  constants->add_option("--alpha", cfg.alpha, "Hoelder order of the distribution functions");

  auto* clt = app.add_subcommand("clt", "Marginal CLT check (Kolmogorov-Smirnov)");
  add_sim(clt);
  add_target(clt);
  clt->add_option("--mode", cfg.mode, "partial_sum or indicator")->check(CLI::IsMember({"partial_sum", "indicator"}));
  clt->add_option("--s", cfg.s, "Level (indicator mode)")->delimiter(',');
  clt->add_option("--n", cfg.n, "Orbit length");
  clt->add_option("--replicates", cfg.replicates, "Independent orbits");
  clt->add_option("--significance", cfg.significance, "KS significance");
  clt->add_option("--variance-band", cfg.variance_band, "Allowed relative variance error");

  auto* fdd = app.add_subcommand("fdd", "Finite-dimensional covariance check");
  add_sim(fdd);
  add_target(fdd);
  fdd->add_option("--s", cfg.s, "Scalar levels")->delimiter(',');
  fdd->add_option("--s-list", s_list_text, "Levels \"s1;s2;...\", components separated by commas");
  fdd->add_option("--n", cfg.n, "Orbit length");
  fdd->add_option("--replicates", cfg.replicates, "Independent orbits");
  fdd->add_option("--frobenius-band", cfg.frobenius_band, "Allowed relative Frobenius error");

  auto* scaling = app.add_subcommand("scaling", "Moment growth of running-max partial sums");
  add_sim(scaling);
  scaling->add_option("--p", cfg.p, "Moment order");
  scaling->add_option("--n-list", cfg.n_list, "Lengths")->delimiter(',');
  scaling->add_option("--replicates", cfg.replicates, "Independent orbits");
  scaling->add_option("--reference-samples", cfg.reference_samples, "Monte-Carlo size for the mean without closed form");

  auto* birkhoff = app.add_subcommand("birkhoff", "Birkhoff averages across orbits");
  add_sim(birkhoff);
  birkhoff->add_option("--n", cfg.n, "Orbit length");
  birkhoff->add_option("--n-orbits", cfg.n_orbits, "Independent orbits");
  birkhoff->add_option("--reference-samples", cfg.reference_samples, "Monte-Carlo size for the mean without closed form");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!observable_text.empty()) {
      try {
        cfg.observable = json::parse(observable_text);
      } catch (const json::exception& e) {
        throw Error(Errc::ConfigError, std::string("--observable is not valid JSON: ") + e.what());
      }
    }
    if (!s_list_text.empty()) cfg.s_list = parse_levels(s_list_text);
    if (cfg.out_dir.empty())
      if (const char* env = std::getenv("TORAL_OUT_DIR")) cfg.out_dir = env;
    set_max_threads(cfg.threads);

    Output output(out, cfg.out_dir);
    if (check->parsed()) cmd_check(cfg, output);
    else if (orbit->parsed()) cmd_orbit(cfg, output);
    else if (empirical->parsed()) cmd_empirical(cfg, output);
    else if (kanto->parsed()) cmd_kanto(cfg, output);
    else if (covariance->parsed()) cmd_covariance(cfg, output);
    else if (constants->parsed()) cmd_constants(cfg, output);
    else if (clt->parsed()) cmd_clt(cfg, output);
    else if (fdd->parsed()) cmd_fdd(cfg, output);
    else if (scaling->parsed()) cmd_scaling(cfg, output);
    else if (birkhoff->parsed()) cmd_birkhoff(cfg, output);
    return 0;
  } catch (const Error& e) {
    report_error(err, errc_name(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, "ConfigError", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "Internal", e.what());
    return 1;
  }
}

}  // namespace toral::cli
