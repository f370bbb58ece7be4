#pragma once

// Observable values along orbits, plus surrogate series with the same
// marginal law and no dynamics (used as null baselines).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toral/automorphism.hpp"
#include "toral/empirical.hpp"
#include "toral/observables.hpp"

namespace toral {

/// f(T^k x0) for k = 1..n.
SampleSeries orbit_series(const TorusAutomorphism& map, const Observable& f, const RationalTorusPoint& x0, std::size_t n);

/// Replicate r runs from random_point(d, q, Rng(Rng::split(seed, r))). Runs in
/// parallel; the output depends only on (seed, replicates, n, q).
std::vector<SampleSeries> orbit_replicates(const TorusAutomorphism& map, const Observable& f, std::size_t n, std::size_t replicates,
                                           std::uint64_t seed, const BigInt& q = default_denominator());

/// f at n independent uniform points.
SampleSeries iid_series(const Observable& f, std::size_t n, Rng& rng);

/// Rows of the series in a uniformly random order (Fisher-Yates).
SampleSeries shuffled(const SampleSeries& series, Rng& rng);

}  // namespace toral
