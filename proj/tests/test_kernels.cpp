#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "toral/kernels.hpp"
#include "toral/rng.hpp"

using namespace toral;

namespace {

// Reference for the documented reduction order: four interleaved lanes,
// folded as (l0 + l2) + (l1 + l3), then the tail in sequence.
template <typename Term>
double lane_sum(std::size_t n, Term term) {
  double lane[4] = {0, 0, 0, 0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; ++i) lane[i % 4] += term(i);
  double acc = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = body; i < n; ++i) acc += term(i);
  return acc;
}

std::vector<double> random_values(std::size_t n, Rng& rng, bool with_ties) {
  std::vector<double> v(n);
  for (auto& x : v) x = with_ties ? std::floor(rng.uniform(-4.0, 4.0)) * 0.5 : rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
  return v;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table follows the documented order") {
    Rng rng(1);
    const auto& k = kernels::scalar();
    for (std::size_t n = 0; n < 70; ++n) {
      const auto a = random_values(n, rng, false);
      const auto b = random_values(n, rng, false);
      CHECK(same_bits(k.sum(a.data(), n), lane_sum(n, [&](std::size_t i) { return a[i]; })));
      CHECK(same_bits(k.dot(a.data(), b.data(), n), lane_sum(n, [&](std::size_t i) { return a[i] * b[i]; })));
      CHECK(same_bits(k.weighted_abs_sum(a.data(), b.data(), n), lane_sum(n, [&](std::size_t i) { return std::abs(a[i]) * b[i]; })));
    }
  }

  TEST_CASE("every available variant matches scalar bit for bit") {
    const auto variants = kernels::available();
    REQUIRE(!variants.empty());
    CHECK(variants.front()->name == "scalar");
    const auto& ref = kernels::scalar();
    Rng rng(2);
    for (const auto* v : variants) {
      CAPTURE(v->name);
      for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = trial < 40 ? static_cast<std::size_t>(trial) : rng.below(5000);
        const bool ties = trial % 2 == 0;
        const auto a = random_values(n, rng, ties);
        const auto b = random_values(n, rng, ties);
        const double s = ties ? 0.5 : rng.uniform(-1e3, 1e3);
        CHECK(v->count_le(a.data(), n, s) == ref.count_le(a.data(), n, s));
        std::vector<double> out_v(n, -1.0), out_r(n, -1.0);
        v->indicator_le(a.data(), n, s, out_v.data());
        ref.indicator_le(a.data(), n, s, out_r.data());
        CHECK(out_v == out_r);
        CHECK(same_bits(v->sum(a.data(), n), ref.sum(a.data(), n)));
        CHECK(same_bits(v->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)));
        CHECK(same_bits(v->weighted_abs_sum(a.data(), b.data(), n), ref.weighted_abs_sum(a.data(), b.data(), n)));
      }
    }
  }

  TEST_CASE("count_le uses a closed inequality") {
    const std::vector<double> x{0.1, 0.5, 0.5, 0.9, -2.0};
    for (const auto* v : kernels::available()) {
      CHECK(v->count_le(x.data(), x.size(), 0.5) == 4);
      CHECK(v->count_le(x.data(), x.size(), -3.0) == 0);
      CHECK(v->count_le(x.data(), x.size(), INFINITY) == 5);
    }
  }

  TEST_CASE("unaligned spans") {
    Rng rng(3);
    const auto a = random_values(1031, rng, false);
    const auto& ref = kernels::scalar();
    for (const auto* v : kernels::available())
      for (std::size_t off = 0; off < 4; ++off) {
        const std::size_t n = a.size() - off;
        CHECK(same_bits(v->sum(a.data() + off, n), ref.sum(a.data() + off, n)));
        CHECK(v->count_le(a.data() + off, n, 0.0) == ref.count_le(a.data() + off, n, 0.0));
      }
  }

  TEST_CASE("active table is one of the available ones") {
    bool found = false;
    for (const auto* v : kernels::available()) found |= v->name == kernels::active().name;
    CHECK(found);
  }
}
