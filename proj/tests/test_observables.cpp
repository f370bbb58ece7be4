#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "toral/error.hpp"
#include "toral/observables.hpp"

using namespace toral;
using namespace toral::test;

namespace {

Observable cos_x1() { return trig_poly(2, {TrigTerm{{1, 0}, 1.0, 0.0}}); }

double eval(const Observable& f, std::vector<double> x) { return f.eval_scalar(x); }

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("trigonometric values and means") {
    const auto f = trig_poly(2, {TrigTerm{{1, 1}, 1.0, 0.0}});
    CHECK(eval(f, {0.25, 0.25}) == doctest::Approx(-1.0));
    CHECK(mean_exact(cos_x1()).values[0] == 0.0);
    const auto c = trig_poly(2, {TrigTerm{{0, 0}, 1.0, 0.0}});
    CHECK(mean_exact(c).values[0] == 1.0);
    CHECK(eval(c, {0.3, 0.6}) == 1.0);
    const auto mixed = trig_poly(2, {TrigTerm{{0, 0}, 0.7, 0.0}, TrigTerm{{2, -1}, 0.5, 0.25}});
    CHECK(mean_exact(mixed).values[0] == 0.7);
    const double x = 0.17, y = 0.61;
    const double arg = 2 * std::numbers::pi * (2 * x - y);
    CHECK(eval(mixed, {x, y}) == doctest::Approx(0.7 + 0.5 * std::cos(arg) + 0.25 * std::sin(arg)));
  }

  TEST_CASE("observables are periodic") {
    Rng rng(4);
    const std::vector<Observable> fs{cos_x1(), log_modulus_example(2.0, {0.3, 0.7}), hoelder_example(0.5, {0.1, 0.9})};
    for (const auto& f : fs)
      for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(), b = rng.uniform();
        // Shift by one lattice vector, folded back into [0, 1).
        const double a2 = std::fmod(a + 1.0, 1.0);
        CHECK(eval(f, {a, b}) == doctest::Approx(eval(f, {a2, b})).epsilon(1e-12));
        // Points near opposite faces are close on the torus.
        CHECK(std::abs(eval(f, {1e-12, b}) - eval(f, {1.0 - 1e-12, b})) < 1e-3);
      }
  }

  TEST_CASE("log-modulus example values") {
    const double a = 2.0;
    const auto f = log_modulus_example(a, {0.3, 0.7});
    CHECK(eval(f, {0.3, 0.7}) == 0.0);
    CHECK(eval(f, {0.8, 0.7}) == doctest::Approx(std::pow(1.0 + std::log(2.0), -a)).epsilon(1e-14));
    CHECK(eval(f, {0.3, 0.2}) == doctest::Approx(std::pow(1.0 + std::log(2.0), -a)).epsilon(1e-14));
    // The torus distance wraps around.
    CHECK(torus_distance(std::vector<double>{0.05, 0.5}, std::vector<double>{0.95, 0.5}) == doctest::Approx(0.1));
    CHECK(std::holds_alternative<regularity::LogModulus>(f.regularity()));
  }

  TEST_CASE("analytic CDF of cos(2 pi x1)") {
    const auto f = cos_x1();
    const auto& F = f.analytic_cdf();
    REQUIRE(F.has_value());
    CHECK((*F)(0.0) == doctest::Approx(0.5));
    CHECK((*F)(-2.0) == 0.0);
    CHECK((*F)(2.0) == 1.0);
    for (double s = -0.99; s < 1.0; s += 0.0731) CHECK((*F)(s) == doctest::Approx(1.0 - std::acos(s) / std::numbers::pi).epsilon(1e-12));
    const auto coord = coordinate(2, 0);
    REQUIRE(coord.analytic_cdf().has_value());
    CHECK((*coord.analytic_cdf())(0.3) == doctest::Approx(0.3));
  }

  TEST_CASE("modulus estimates") {
    Rng rng(6);
    CHECK(modulus_estimate(constant(2, 3.0), 0.1, 1000, rng).value == 0.0);
    const auto wide = modulus_estimate(cos_x1(), 0.49, 200000, rng);
    CHECK(wide.value > 1.99);
    CHECK(wide.value <= 2.0);
    CHECK(wide.lower_bound);
    CHECK(wide.n_pairs == 200000);
    // Nested balls: the estimate is nondecreasing in delta up to noise.
    double previous = 0.0;
    for (double delta : {0.01, 0.05, 0.1, 0.2, 0.4}) {
      const double w = modulus_estimate(cos_x1(), delta, 20000, rng).value;
      CHECK(w >= previous * 0.98);
      CHECK(w <= 2.0 * std::sin(std::numbers::pi * delta) + 1e-12);
      previous = w;
    }
    CHECK_THROWS_AS(modulus_estimate(cos_x1(), 0.5, 10, rng), Error);
  }

  TEST_CASE("running max is nondecreasing in the number of pairs") {
    const auto f = hoelder_example(0.5, {0.2, 0.2});
    double previous = 0.0;
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
      Rng rng(9);  // same stream: more pairs extend the same sequence
      const double w = modulus_estimate(f, 0.05, n, rng).value;
      CHECK(w >= previous);
      previous = w;
    }
  }

  TEST_CASE("Hoelder tags are honest") {
    Rng rng(10);
    for (double alpha : {0.25, 0.5, 1.0}) {
      const auto f = hoelder_example(alpha, {0.4, 0.6});
      for (int e = 2; e <= 20; e += 2) {
        const double delta = std::ldexp(1.0, -e);
        CHECK(modulus_estimate(f, delta, 4000, rng).value <= std::pow(delta, alpha) * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("log-modulus decay fit") {
    Rng rng(12);
    std::vector<double> deltas;
    for (int e = 4; e <= 20; ++e) deltas.push_back(std::ldexp(1.0, -e));
    const auto fit = fit_modulus_decay(log_modulus_example(2.0, {0.3, 0.7}), deltas, 4000, rng);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.2));
    for (std::size_t i = 0; i < deltas.size(); ++i) CHECK(fit.estimates[i] <= std::pow(1.0 + std::abs(std::log(deltas[i])), -2.0) + 1e-12);
  }

  TEST_CASE("directional moduli") {
    const TorusAutomorphism cat(to_int_matrix(kCat));
    const auto split = stable_splitting(cat);
    Rng rng(13);
    const double full = modulus_estimate(cos_x1(), 0.1, 20000, rng).value;
    const double unstable = directional_modulus_estimate(cos_x1(), split, Direction::Unstable, 0.1, 20000, rng).value;
    CHECK(unstable > 0.0);
    CHECK(unstable <= full * 1.02);
    CHECK(directional_modulus_estimate(constant(2, 1.0), split, Direction::StableNeutral, 0.1, 100, rng).value == 0.0);
    const auto rot = stable_splitting(TorusAutomorphism(to_int_matrix(kRotation)));
    CHECK_THROWS_AS(directional_modulus_estimate(cos_x1(), rot, Direction::Unstable, 0.1, 10, rng), Error);
  }

  TEST_CASE("Monte-Carlo means") {
    Rng rng(14);
    const auto small = mean_mc(cos_x1(), 10000, rng);
    CHECK(std::abs(small.values[0]) < 3 * small.standard_errors[0]);
    const auto large = mean_mc(cos_x1(), 40000, rng);
    // Quadrupling n halves the standard error.
    CHECK(large.standard_errors[0] / small.standard_errors[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(mean_mc(constant(2, 2.5), 100, rng).values[0] == 2.5);
    CHECK_THROWS_AS(mean_exact(log_modulus_example(1.0, {0.5, 0.5})), Error);
  }

  TEST_CASE("observables from configuration") {
    const auto f = observable_from_json(nlohmann::json::parse(R"({"type":"trig","terms":[{"k":[1,0],"cos":1.0}]})"), 2);
    CHECK(eval(f, {0.25, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
    const auto g = observable_from_json(nlohmann::json::parse(R"({"type":"log_modulus","a":2.0,"anchor":[0.3,0.7]})"), 2);
    CHECK(std::holds_alternative<regularity::LogModulus>(g.regularity()));
    const auto s = observable_from_json(
        nlohmann::json::parse(R"({"type":"stack","components":[{"type":"coordinate","index":0},{"type":"coordinate","index":1}]})"), 2);
    CHECK(s.ell() == 2);
    for (const char* bad : {R"({"type":"nope"})", R"({"type":"trig","terms":[{"k":[1],"cos":1}]})", R"({"type":"trig","terms":[],"extra":1})", "[1]"}) {
      try {
        observable_from_json(nlohmann::json::parse(bad), 2);
        FAIL("accepted " << bad);
      } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
      }
    }
  }
}
