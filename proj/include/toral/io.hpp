#pragma once

// Text formats: matrix input, orbit and process CSV dumps, JSON fragments.
// Doubles are always written with 17 significant digits so files round-trip.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "toral/automorphism.hpp"
#include "toral/empirical.hpp"
#include "toral/limits.hpp"
#include "toral/polynomial.hpp"

namespace toral {

/// "{:.17g}".
std::string format_double(double v);

/// JSON array of arrays of integers (numbers or decimal strings), or the
/// inline form "2,1;1,1". Throws ConfigError on malformed input and
/// NotSquare / InvalidArgument from the matrix constructor.
IntMatrix parse_matrix(std::string_view text);
IntMatrix matrix_from_json(const nlohmann::json& j);

/// Entries that fit in 64 bits become numbers, larger ones decimal strings.
nlohmann::json to_json(const BigInt& v);
nlohmann::json to_json(const IntMatrix& m);
/// Coefficients, lowest degree first.
nlohmann::json to_json(const IntPolynomial& p);
BigInt bigint_from_json(const nlohmann::json& j);

/// Header "k,num_1,...,num_d,q"; one row per point.
void write_orbit_csv(std::ostream& out, const Orbit& orbit);

/// Header "t,s_1,...,s_ell,value"; rows in (t, flattened s) order.
void write_process_csv(std::ostream& out, const EmpiricalProcessGrid& grid);

/// n, seed, grids and the observable's configuration object.
nlohmann::json process_header(const EmpiricalProcessGrid& grid, std::uint64_t seed, const nlohmann::json& observable_spec);

/// Header "i,j,s_i_1..,s_j_1..,lambda,se"; every ordered pair.
void write_covariance_csv(std::ostream& out, const CovarianceGrid& grid);

}  // namespace toral
