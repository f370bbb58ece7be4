#include "toral/series.hpp"

#include <optional>
#include <utility>

#include "toral/error.hpp"
#include "toral/parallel.hpp"

namespace toral {

SampleSeries orbit_series(const TorusAutomorphism& map, const Observable& f, const RationalTorusPoint& x0, std::size_t n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "series length must be positive");
  if (f.dim() != map.dim() || x0.dim() != map.dim()) throw Error(Errc::InvalidArgument, "observable, point and map dimensions differ");
  const std::size_t ell = f.ell();
  std::vector<double> values(n * ell);
  OrbitCursor cursor(map, x0);
  for (std::size_t k = 0; k < n; ++k) {
    cursor.advance();
    f.eval(cursor.coords(), std::span<double>(values.data() + k * ell, ell));
  }
  return SampleSeries(n, ell, std::move(values));
}

std::vector<SampleSeries> orbit_replicates(const TorusAutomorphism& map, const Observable& f, std::size_t n, std::size_t replicates,
                                           std::uint64_t seed, const BigInt& q) {
  if (replicates < 1) throw Error(Errc::InvalidArgument, "need at least one replicate");
  std::vector<std::optional<SampleSeries>> slots(replicates);
  parallel_for(replicates, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      Rng rng(Rng::split(seed, r));
      slots[r].emplace(orbit_series(map, f, random_point(map.dim(), q, rng), n));
    }
  });
  std::vector<SampleSeries> out;
  out.reserve(replicates);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

SampleSeries iid_series(const Observable& f, std::size_t n, Rng& rng) {
  if (n < 1) throw Error(Errc::InvalidArgument, "series length must be positive");
  const std::size_t ell = f.ell();
  std::vector<double> values(n * ell);
  std::vector<double> x(f.dim());
  for (std::size_t k = 0; k < n; ++k) {
    for (double& c : x) c = rng.uniform();
    f.eval(x, std::span<double>(values.data() + k * ell, ell));
  }
  return SampleSeries(n, ell, std::move(values));
}

SampleSeries shuffled(const SampleSeries& series, Rng& rng) {
  const std::size_t n = series.n();
  const std::size_t ell = series.ell();
  std::vector<double> values = series.values();
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    for (std::size_t c = 0; c < ell; ++c) std::swap(values[i * ell + c], values[j * ell + c]);
  }
  return SampleSeries(n, ell, std::move(values));
}

}  // namespace toral
