#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "toral/error.hpp"
#include "toral/limits.hpp"
#include "toral/series.hpp"

using namespace toral;
using namespace toral::test;

namespace {

std::vector<SampleSeries> orbits(const Observable& f, std::size_t count, std::size_t length, std::uint64_t seed) {
  return orbit_replicates(TorusAutomorphism(to_int_matrix(kCat)), f, length, count, seed);
}

Observable cos_x1() { return trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}}); }

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("k function values and domain") {
    CHECK(k_function(1, 1.0, 3.0) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(k_function(1, 1.0, 4.0) == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(k_function(1, 1.0, 2.0 + 1e-9) > 1e8);
    for (double p : {2.0, 1.0, -3.0}) {
      try {
        k_function(1, 1.0, p);
        FAIL("expected DomainError");
      } catch (const Error& e) {
        CHECK(e.code() == Errc::DomainError);
      }
    }
    CHECK_THROWS_AS(k_function(1, 0.0, 3.0), Error);
    CHECK_THROWS_AS(k_function(0, 1.0, 3.0), Error);
  }

  TEST_CASE("Cardan root for ell = alpha = 1") {
    const auto c = cardan_p0(1, 1.0);
    CHECK(c.b == -2.0);
    CHECK(c.c == -4.0);
    CHECK(c.d == 4.0);
    CHECK(c.p0 == doctest::Approx(2.9).epsilon(0.01 / 2.9));
    const double p = c.p0;
    CHECK(std::abs(p * p * p - 2 * p * p - 4 * p + 4) < 1e-12);
    CHECK(std::abs(c.residual) < 1e-12);
    CHECK(c.delta < 0.0);
  }

  TEST_CASE("Cardan agrees with bisection on the branch balance") {
    for (int ell = 1; ell <= 5; ++ell)
      for (double alpha : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        CAPTURE(ell);
        CAPTURE(alpha);
        const auto c = cardan_p0(ell, alpha);
        CHECK(std::abs(c.p0 - bisection_p0(ell, alpha)) < 1e-10);
        CHECK(c.delta < 0.0);
        CHECK(c.p0 > 2.0 * ell);
        CHECK(c.p0 < 4.0 * ell);
        CHECK(std::abs(c.residual) < 1e-10);
      }
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int ell = 1 + static_cast<int>(rng.below(8));
      const double alpha = 1e-3 + (1.0 - 1e-3) * rng.uniform();
      CHECK(std::abs(cardan_p0(ell, alpha).p0 - bisection_p0(ell, alpha)) < 1e-10);
    }
  }

  TEST_CASE("threshold constants") {
    const auto t = a_constant(1, 1.0);
    CHECK(std::abs(t.a_value - 10.0 / 3.0) < 1e-12);
    CHECK(t.p1 == 3.0);
    CHECK(t.k(3.0) == t.a_value);
    const auto t2 = a_constant(2, 0.5);
    CHECK(t2.p1 == t2.cubic.p0);
    for (int ell = 1; ell <= 5; ++ell) {
      double previous = INFINITY;
      for (double alpha : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        const auto c = a_constant(ell, alpha);
        CHECK(c.p1 == std::max(3.0, c.cubic.p0));
        CHECK(c.a_value == k_function(ell, alpha, c.p1));
        CHECK(std::abs(c.a_value - oracle_min_k(ell, alpha)) < 1e-6);
        CHECK(c.grid_min >= c.a_value - 1e-6);
        CHECK(c.a_value <= previous);
        previous = c.a_value;
      }
    }
  }

  TEST_CASE("long-run covariance input checks") {
    const std::vector<std::vector<double>> a{std::vector<double>(50, 1.0)};
    try {
      long_run_covariance(a, a, 10);
      FAIL("expected InsufficientLength");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InsufficientLength);
    }
    const auto ok = long_run_covariance(a, a, 5);
    CHECK(ok.value == 0.0);
    CHECK(std::isnan(ok.standard_error));
  }

  TEST_CASE("constant observables have zero covariance") {
    const auto series = orbits(constant(2, 0.7), 4, 2000, 1);
    const auto grid = covariance_lambda(series, scalar_levels({0.0, 0.7, 1.0}), 10);
    CHECK(grid.estimates.isZero(0.0));
    CHECK(sigma_squared(series, 10).value == 0.0);
  }

  TEST_CASE("covariance grid structure") {
    const auto series = orbits(cos_x1(), 16, 4096, 2);
    const auto grid = covariance_lambda(series, scalar_levels({-2.0, -0.5, 0.0, 0.3, 0.7}), 20);
    CHECK(grid.estimates == grid.estimates.transpose());
    for (Eigen::Index j = 0; j < grid.estimates.cols(); ++j) CHECK(grid.estimates(0, j) == 0.0);
    for (Eigen::Index i = 0; i < grid.estimates.rows(); ++i) CHECK(grid.estimates(i, i) >= -3.0 * grid.standard_errors(i, i));
    CHECK(grid.diag_lag_terms.rows() == 21);
    CHECK(grid.n_orbits == 16);
    CHECK(grid.orbit_length == 4096);
  }

  TEST_CASE("levels of a function of x1 decorrelate under the cat map") {
    // (x1, (T^k x)_1) are independent for k >= 1, so Lambda = c0 and for the
    // coordinate at s = 1/2 this is 1/4.
    const auto series = orbits(coordinate(2, 0), 64, 4096, 3);
    const auto grid = covariance_lambda(series, scalar_levels({0.5}), 10);
    CHECK(grid.diag_lag_terms(0, 0) == doctest::Approx(0.25).epsilon(0.01));
    CHECK(std::abs(grid.estimates(0, 0) - 0.25) < 4 * grid.standard_errors(0, 0));
    for (int k = 1; k <= 10; ++k) CHECK(std::abs(grid.diag_lag_terms(k, 0)) < 4 * grid.diag_lag_standard_errors(k, 0));
  }

  TEST_CASE("sigma squared of cos(2 pi x1) is its variance") {
    const auto s = sigma_squared(TorusAutomorphism(to_int_matrix(kCat)), cos_x1(), 30, OrbitSampling{64, 16384, 4, default_denominator()});
    CHECK(std::abs(s.value - 0.5) < 4 * s.standard_error);
    CHECK(s.lag_terms.size() == 31);
    CHECK(s.lag_terms[0] == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("shuffling removes the lag terms") {
    const TorusAutomorphism quartic(to_int_matrix(kQuartic));
    const auto f = trig_poly(4, {TrigTerm{{1, 0, 0, 0}, 1.0, 0.0}, TrigTerm{{0, 1, 0, 0}, 0.5, 0.0}});
    const auto series = orbit_replicates(quartic, f, 4096, 32, 5);
    Rng rng(6);
    std::vector<SampleSeries> shuffled_series;
    double variance = 0.0;
    for (const auto& s : series) {
      shuffled_series.push_back(shuffled(s, rng));
      double mean = 0.0;
      for (double v : s.values()) mean += v;
      mean /= static_cast<double>(s.n());
      double var = 0.0;
      for (double v : s.values()) var += (v - mean) * (v - mean);
      variance += var / static_cast<double>(s.n()) / static_cast<double>(series.size());
    }
    const auto sh = sigma_squared(shuffled_series, 20);
    CHECK(std::abs(sh.value - variance) < 3 * sh.standard_error);
  }

  TEST_CASE("Lambda_p with unit weights is sigma squared") {
    const auto series = orbits(cos_x1(), 16, 4096, 7);
    const double M = 1.0 + 1e-9;
    const auto one = [](double) { return 1.0; };
    const auto lp = covariance_lambda_p(series, one, one, M, 20);
    const auto s2 = sigma_squared(series, 20);
    CHECK(lp.value == doctest::Approx(s2.value).epsilon(1e-9));
    const auto zero = [](double) { return 0.0; };
    CHECK(covariance_lambda_p(series, zero, zero, M, 20).value == 0.0);
    const auto g = [](double s) { return s * s; };
    const auto h = [](double s) { return std::cos(s); };
    const auto gh = covariance_lambda_p(series, g, h, M, 20);
    const auto hg = covariance_lambda_p(series, h, g, M, 20);
    CHECK(std::abs(gh.value - hg.value) <= 3 * std::max(gh.standard_error, hg.standard_error));
  }
}
