#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "support.hpp"
#include "toral/empirical.hpp"
#include "toral/error.hpp"
#include "toral/series.hpp"

using namespace toral;
using namespace toral::test;

namespace {

ReferenceCdf uniform01() { return ReferenceCdf::piecewise_linear({0.0, 1.0}, {0.0, 1.0}); }

/// n K(mu_{n,k}, mu) for mu uniform on [0, 1] and mu_{n,k} the mixture of the
/// first k point masses (weight 1/n each) with (1 - k/n) mu. Between the
/// breakpoints F_{n,k} - F is linear, so |.| integrates exactly per piece.
double mixture_oracle(const std::vector<double>& x, std::size_t k, double M) {
  const double n = static_cast<double>(x.size());
  std::vector<double> cuts{-M, 0.0, 1.0, M};
  cuts.insert(cuts.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(cuts.begin(), cuts.end());
  auto diff = [&](double s) {
    const double F = std::clamp(s, 0.0, 1.0);
    double mix = (1.0 - static_cast<double>(k) / n) * F;
    for (std::size_t i = 0; i < k; ++i) mix += (x[i] <= s ? 1.0 : 0.0) / n;
    return mix - F;
  };
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    if (hi <= lo) continue;
    // Evaluate just inside the piece so jumps at the ends do not leak in.
    const double w = hi - lo;
    const double g0 = diff(lo + 1e-9 * w), g1 = diff(hi - 1e-9 * w);
    const double slope = (g1 - g0) / (w * (1.0 - 2e-9));
    const double a = g0 - slope * 1e-9 * w, b = a + slope * w;
    if (a * b >= 0.0) {
      total += 0.5 * std::abs(a + b) * w;
    } else {
      const double r = a / (a - b) * w;
      total += 0.5 * (std::abs(a) * r + std::abs(b) * (w - r));
    }
  }
  return n * total;
}

double direct_process(const std::vector<double>& x, std::size_t m, double s, double F, std::size_t n) {
  double count = 0.0;
  for (std::size_t k = 0; k < m; ++k) count += x[k] <= s ? 1.0 : 0.0;
  return (count - static_cast<double>(m) * F) / std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_SUITE("empirical") {
  TEST_CASE("sample series validation") {
    CHECK_THROWS_AS(SampleSeries(2, 1, {1.0}), Error);
    CHECK_THROWS_AS(SampleSeries::scalar({1.0, NAN}), Error);
    CHECK_THROWS_AS(SampleSeries::scalar({}), Error);
    const SampleSeries s(3, 2, {1, 2, 3, 4, 5, 6});
    CHECK(s(1, 0) == 3);
    CHECK(s.component(1) == std::vector<double>{2, 4, 6});
    CHECK(s.prefix(2).values() == std::vector<double>{1, 2, 3, 4});
  }

  TEST_CASE("empirical CDF") {
    const auto s = SampleSeries::scalar({0.2, 0.4, 0.9});
    CHECK(empirical_cdf(s, std::vector<double>{0.5}) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_cdf(s, std::vector<double>{INFINITY}) == 1.0);
    CHECK(empirical_cdf(s, std::vector<double>{0.1}) == 0.0);
    CHECK(empirical_cdf(s, std::vector<double>{0.4}) == doctest::Approx(2.0 / 3.0));
    const SampleSeries v(3, 2, {0.1, 0.9, 0.5, 0.5, 0.9, 0.1});
    CHECK(empirical_cdf(v, std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0 / 3.0));
    CHECK(empirical_cdf(v, std::vector<double>{1.0, 1.0}) == 1.0);
  }

  TEST_CASE("empirical CDF is monotone in each component") {
    Rng rng(1);
    std::vector<double> vals(2 * 300);
    for (auto& x : vals) x = rng.uniform();
    const SampleSeries v(300, 2, vals);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> s{rng.uniform(), rng.uniform()};
      const double base = empirical_cdf(v, s);
      for (std::size_t c = 0; c < 2; ++c) {
        auto t = s;
        t[c] += rng.uniform(0.0, 0.3);
        CHECK(empirical_cdf(v, t) >= base);
      }
    }
  }

  TEST_CASE("reference CDFs") {
    const auto x1 = coordinate(2, 0);
    CHECK(reference_cdf_analytic(x1, std::vector<double>{0.3}).value == doctest::Approx(0.3));
    const auto c = trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}});
    CHECK(reference_cdf_analytic(c, std::vector<double>{0.0}).value == doctest::Approx(0.5));
    CHECK(reference_cdf_analytic(c, std::vector<double>{-1e300}).value == 0.0);
    CHECK_THROWS_AS(reference_cdf_analytic(log_modulus_example(1.0, {0.5, 0.5}), std::vector<double>{0.1}), Error);
    Rng rng(2);
    const auto mc = reference_cdf_mc(c, std::vector<double>{0.0}, 40000, rng);
    CHECK(std::abs(mc.value - 0.5) < 4 * mc.standard_error);
    CHECK(mc.standard_error == doctest::Approx(std::sqrt(0.25 / 40000)).epsilon(0.02));
  }

  TEST_CASE("process hand examples and invariants") {
    const auto half = [](std::span<const double>) { return 0.5; };
    const auto g = sequential_process(SampleSeries::scalar({0.1, 0.9}), {0.0, 1.0}, {{0.5}}, half);
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(1, 0) == 0.0);

    const auto step = ReferenceCdf::piecewise_linear({0.3, 0.3}, {0.0, 1.0});
    const auto constant = sequential_process(SampleSeries::scalar(std::vector<double>(16, 0.3)), {0.0, 0.5, 1.0}, {{-1.0, 0.29, 0.3, 0.5}},
                                             as_multi_cdf(step));
    for (double v : constant.values) CHECK(v == 0.0);

    Rng rng(3);
    std::vector<double> x(257);
    for (auto& v : x) v = rng.uniform();
    const std::vector<double> t{0.0, 0.001, 0.25, 0.5, 0.999, 1.0};
    const std::vector<double> s{-0.5, 0.0, 0.1, 0.5, 0.9, 1.0, 2.0};
    const auto grid = sequential_process(SampleSeries::scalar(x), t, {s}, as_multi_cdf(uniform01()));
    const double rn = std::sqrt(257.0);
    for (std::size_t ti = 0; ti < t.size(); ++ti) {
      const auto m = static_cast<std::size_t>(std::floor(257.0 * t[ti]));
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(std::abs(grid.at(ti, j)) * rn <= static_cast<double>(m) + 1e-9);
        CHECK(grid.at(ti, j) == doctest::Approx(direct_process(x, m, s[j], std::clamp(s[j], 0.0, 1.0), 257)).epsilon(1e-12));
      }
    }
    CHECK(grid.at(0, 3) == 0.0);
    CHECK(grid.at(3, 0) == 0.0);
  }

  TEST_CASE("two-dimensional grids flatten with the last component fastest") {
    const SampleSeries v(4, 2, {0.1, 0.2, 0.6, 0.7, 0.3, 0.9, 0.8, 0.4});
    const auto F = product_cdf({uniform01(), uniform01()});
    const auto grid = sequential_process(v, {1.0}, {{0.25, 0.75}, {0.5, 1.0}}, F);
    CHECK(grid.s_points() == 4);
    CHECK(grid.level(1) == std::vector<double>{0.25, 1.0});
    CHECK(grid.level(2) == std::vector<double>{0.75, 0.5});
    // Only the first row lies below s = (0.75, 0.5).
    CHECK(grid.at(0, 2) == doctest::Approx((1.0 - 4 * 0.75 * 0.5) / 2.0));
  }

  TEST_CASE("streaming and batch agree bit for bit") {
    Rng rng(4);
    const TorusAutomorphism cat(to_int_matrix(kCat));
    const auto f = stack({trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}}), trig_poly(2, {TrigTerm{{1, 1}, 0.0, 1.0}})});
    const std::size_t n = 512;
    const auto series = orbit_series(cat, f, random_point(2, default_denominator(), rng), n);
    const std::vector<std::vector<double>> grids{{-0.7, 0.0, 0.4}, {-0.2, 0.5}};
    auto mc_rng = Rng(5);
    const auto F = monte_carlo_cdf(f, 5000, mc_rng);
    std::vector<double> t;
    for (std::size_t m = 0; m <= n; m += 32) t.push_back(static_cast<double>(m) / n);
    const auto batch = sequential_process(series, t, grids, F);
    SequentialProcessAccumulator acc(n, grids, F);
    std::size_t ti = 0;
    for (std::size_t m = 0; m <= n; ++m) {
      if (m % 32 == 0) {
        const auto row = acc.row();
        for (std::size_t j = 0; j < row.size(); ++j) CHECK(row[j] == batch.at(ti, j));
        ++ti;
      }
      if (m < n) acc.push(series.row(m));
    }
    CHECK(acc.count() == n);
  }

  TEST_CASE("process is deterministic and thread-count independent") {
    Rng rng(6);
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.normal();
    const auto s = default_s_grid(x, 10.0);
    const auto a = sequential_process(SampleSeries::scalar(x), {0.3, 1.0}, {s}, [](std::span<const double> v) { return 0.5 * std::erfc(-v[0] / std::sqrt(2.0)); });
    const auto b = sequential_process(SampleSeries::scalar(x), {0.3, 1.0}, {s}, [](std::span<const double> v) { return 0.5 * std::erfc(-v[0] / std::sqrt(2.0)); });
    CHECK(a.values == b.values);
  }

  TEST_CASE("default grids and bounds") {
    std::vector<double> x(1000);
    std::iota(x.begin(), x.end(), 0.0);
    const auto g = default_s_grid(x, 2000.0, 4);
    CHECK(g == std::vector<double>{-2000.0, 125.0, 375.0, 625.0, 875.0, 2000.0});
    const auto tied = default_s_grid(std::vector<double>(50, 1.0), 2.0);
    CHECK(tied == std::vector<double>{-2.0, 1.0, 2.0});
    CHECK(default_support_bound(std::vector<double>{-0.5, 0.25}, uniform01()) > 1.0);
    CHECK(default_support_bound(std::vector<double>{-3.0, 0.25}, uniform01()) == std::nextafter(3.0, 4.0));
  }

  TEST_CASE("L^p norms") {
    CHECK(lp_norm_in_s(SampleSeries::scalar({0.5}), uniform01(), 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    // p = 2 for the same sample: int_0^.5 s^2 + int_.5^1 (1-s)^2 = 1/12.
    CHECK(lp_norm_in_s(SampleSeries::scalar({0.5}), uniform01(), 2.0, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    const auto step = ReferenceCdf::piecewise_linear({0.3, 0.3}, {0.0, 1.0});
    CHECK(lp_norm_in_s(SampleSeries::scalar({0.3, 0.3, 0.3}), step, 3.0, 1.0) == 0.0);
    CHECK_THROWS_AS(lp_norm_in_s(SampleSeries(1, 2, {0.1, 0.2}), uniform01(), 1.0, 1.0), Error);
    CHECK_THROWS_AS(lp_norm_in_s(SampleSeries::scalar({0.5}), uniform01(), 0.5, 1.0), Error);
    CHECK_THROWS_AS(lp_norm_in_s(SampleSeries::scalar({1.5}), uniform01(), 1.0, 1.0), Error);
  }

  TEST_CASE("L^p norms against fine quadrature") {
    Rng rng(7);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      std::vector<double> x(40);
      for (auto& v : x) v = rng.uniform();
      const double exact = lp_norm_in_s(SampleSeries::scalar(x), uniform01(), p, 1.5);
      const std::size_t cells = 400000;
      const double h = 3.0 / cells;
      double quad = 0.0;
      for (std::size_t c = 0; c < cells; ++c) {
        const double s = -1.5 + (c + 0.5) * h;
        double count = 0.0;
        for (double v : x) count += v <= s;
        quad += std::pow(std::abs(count - 40.0 * std::clamp(s, 0.0, 1.0)), p) * h;
      }
      CHECK(exact == doctest::Approx(quad).epsilon(1e-4));
    }
  }

  TEST_CASE("continuous Kantorovich distance") {
    // Point mass at 0 against point mass at b.
    for (double b : {0.25, 1.0, 3.0}) {
      const auto at_b = ReferenceCdf::piecewise_linear({b, b}, {0.0, 1.0});
      CHECK(kantorovich_continuous(SampleSeries::scalar({0.0, 0.0}), at_b, 4.0) == doctest::Approx(b).epsilon(1e-14));
    }
    const auto at_zero = ReferenceCdf::piecewise_linear({0.0, 0.0}, {0.0, 1.0});
    CHECK(kantorovich_continuous(SampleSeries::scalar({0.0}), at_zero, 1.0) == 0.0);
    // Consistency: i.i.d. uniform samples approach mu.
    Rng rng(8);
    double previous = INFINITY;
    for (std::size_t n : {100u, 10000u, 1000000u}) {
      std::vector<double> x(n);
      for (auto& v : x) v = rng.uniform();
      const double K = kantorovich_continuous(SampleSeries::scalar(x), uniform01(), 1.0);
      CHECK(K < previous);
      previous = K;
    }
    CHECK(previous < 2e-3);
  }

  TEST_CASE("n K equals the L^1 norm of S_n exactly") {
    Rng rng(9);
    const auto cos_f = trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}});
    const auto F = *cos_f.analytic_cdf();
    const auto callable = ReferenceCdf::callable([](double s) { return 0.5 * std::erfc(-s / std::sqrt(2.0)); }, 1e-3);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.below(300);
      std::vector<double> x(n), z(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::cos(2 * std::numbers::pi * rng.uniform());
        z[i] = rng.normal();
      }
      const auto sx = SampleSeries::scalar(x);
      const double M = default_support_bound(x, F);
      CHECK(kantorovich_continuous(sx, F, M) == lp_norm_in_s(sx, F, 1.0, M) / static_cast<double>(n));
      const auto sz = SampleSeries::scalar(z);
      const double Mz = default_support_bound(z, callable) + 1.0;
      CHECK(kantorovich_continuous(sz, callable, Mz) == lp_norm_in_s(sz, callable, 1.0, Mz) / static_cast<double>(n));
    }
  }

  TEST_CASE("discrete Kantorovich against brute-force matching") {
    Rng rng(10);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t total = 1 + rng.below(6);
      const auto a = random_unit_measure(total, rng);
      const auto b = random_unit_measure(total, rng);
      const double oracle = brute_force_transport(a.units, b.units);
      CHECK(std::abs(kantorovich_discrete(a.weights, a.atoms, b.weights, b.atoms) - oracle) < 1e-12);
    }
  }

  TEST_CASE("discrete Kantorovich metric properties") {
    Rng rng(11);
    auto random_measure = [&](std::vector<double>& w, std::vector<double>& a) {
      const std::size_t k = 1 + rng.below(6);
      w.assign(k, 0.0);
      a.assign(k, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        w[i] = static_cast<double>(1 + rng.below(8));
        a[i] = rng.uniform(-3.0, 3.0);
      }
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (auto& x : w) x /= total;
    };
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> w1, a1, w2, a2, w3, a3;
      random_measure(w1, a1);
      random_measure(w2, a2);
      random_measure(w3, a3);
      const double d12 = kantorovich_discrete(w1, a1, w2, a2);
      const double d21 = kantorovich_discrete(w2, a2, w1, a1);
      const double d13 = kantorovich_discrete(w1, a1, w3, a3);
      const double d23 = kantorovich_discrete(w2, a2, w3, a3);
      CHECK(d12 == doctest::Approx(d21).epsilon(1e-14));
      CHECK(d13 <= d12 + d23 + 1e-12);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < w1.size(); ++i) m1 += w1[i] * a1[i];
      for (std::size_t i = 0; i < w2.size(); ++i) m2 += w2[i] * a2[i];
      CHECK(d12 >= std::abs(m1 - m2) - 1e-12);
      CHECK(kantorovich_discrete(w1, a1, w1, a1) == 0.0);
    }
    const std::vector<double> one{1.0};
    CHECK(kantorovich_discrete(one, std::vector<double>{0.0}, one, std::vector<double>{1.0}) == 1.0);
    try {
      kantorovich_discrete(std::vector<double>{0.5, 0.4}, std::vector<double>{0, 1}, one, std::vector<double>{0});
      FAIL("expected WeightSumMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::WeightSumMismatch);
    }
  }

  TEST_CASE("sequential Kantorovich against the mixture oracle") {
    Rng rng(12);
    std::vector<double> x(10);
    for (auto& v : x) v = rng.uniform();
    const auto series = SampleSeries::scalar(x);
    const auto profile = sequential_l1_profile(series, uniform01(), 1.0);
    REQUIRE(profile.size() == 10);
    double best = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) {
      const double oracle = mixture_oracle(x, k, 1.0);
      CHECK(profile[k - 1] == doctest::Approx(oracle).epsilon(1e-6));
      CHECK(profile[k - 1] == doctest::Approx(lp_norm_in_s(series, uniform01(), 1.0, 1.0, k)).epsilon(1e-12));
      best = std::max(best, oracle);
    }
    const double sup = sequential_kantorovich_sup(series, uniform01(), 1.0);
    CHECK(sup == doctest::Approx(best / std::sqrt(10.0)).epsilon(1e-6));
    CHECK(sup >= profile.back() / std::sqrt(10.0));
    const auto single = SampleSeries::scalar({0.5});
    CHECK(sequential_kantorovich_sup(single, uniform01(), 1.0) == doctest::Approx(lp_norm_in_s(single, uniform01(), 1.0, 1.0)));
  }

  TEST_CASE("surrogate series") {
    Rng rng(13);
    const auto f = trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}});
    const auto iid = iid_series(f, 1000, rng);
    auto sorted = iid.values();
    const auto perm = shuffled(iid, rng);
    auto sorted_perm = perm.values();
    std::sort(sorted.begin(), sorted.end());
    std::sort(sorted_perm.begin(), sorted_perm.end());
    CHECK(sorted == sorted_perm);
    CHECK(perm.values() != iid.values());
  }

  TEST_CASE("orbit replicates are reproducible") {
    const TorusAutomorphism cat(to_int_matrix(kCat));
    const auto f = trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}});
    const auto a = orbit_replicates(cat, f, 100, 8, 77);
    const auto b = orbit_replicates(cat, f, 100, 8, 77);
    const auto c = orbit_replicates(cat, f, 100, 8, 78);
    for (std::size_t r = 0; r < 8; ++r) {
      CHECK(a[r].values() == b[r].values());
      CHECK(a[r].values() != c[r].values());
    }
    Rng start(Rng::split(77, 3));
    CHECK(orbit_series(cat, f, random_point(2, default_denominator(), start), 100).values() == a[3].values());
  }
}
