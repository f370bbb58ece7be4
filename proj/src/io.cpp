#include "toral/io.hpp"

#include <cctype>
#include <limits>

#include <fmt/format.h>

#include "toral/error.hpp"

namespace toral {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

BigInt parse_integer(const std::string& token) {
  std::string t = token;
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  const std::size_t digits_from = (!t.empty() && t.front() == '-') ? 1 : 0;
  if (t.size() == digits_from) throw Error(Errc::ConfigError, "empty matrix entry");
  for (std::size_t i = digits_from; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw Error(Errc::ConfigError, "matrix entry '" + token + "' is not an integer");
  return BigInt(t, 10);
}

}  // namespace

BigInt bigint_from_json(const json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return BigInt(std::to_string(j.get<std::uint64_t>()), 10);
    return BigInt(std::to_string(j.get<std::int64_t>()), 10);
  }
  if (j.is_string()) return parse_integer(trim(j.get<std::string>()));
  throw Error(Errc::ConfigError, "expected an integer, got " + j.dump());
}

IntMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::ConfigError, "matrix must be a non-empty array of rows");
  std::vector<std::vector<BigInt>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw Error(Errc::ConfigError, "matrix rows must be arrays");
    std::vector<BigInt> r;
    for (const auto& e : row) r.push_back(bigint_from_json(e));
    rows.push_back(std::move(r));
  }
  return IntMatrix(rows);
}

IntMatrix parse_matrix(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw Error(Errc::ConfigError, "empty matrix");
  if (t.front() == '[') {
    json j;
    try {
      j = json::parse(t);
    } catch (const json::exception& e) {
      throw Error(Errc::ConfigError, std::string("malformed matrix JSON: ") + e.what());
    }
    return matrix_from_json(j);
  }
  std::vector<std::vector<BigInt>> rows;
  std::size_t start = 0;
  while (start <= t.size()) {
    const std::size_t semi = std::min(t.find(';', start), t.size());
    const std::string row_text = trim(std::string_view(t).substr(start, semi - start));
    std::vector<BigInt> row;
    std::size_t pos = 0;
    while (pos <= row_text.size()) {
      const std::size_t comma = std::min(row_text.find(',', pos), row_text.size());
      row.push_back(parse_integer(trim(std::string_view(row_text).substr(pos, comma - pos))));
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
    start = semi + 1;
  }
  return IntMatrix(rows);
}

json to_json(const BigInt& v) {
  if (mpz_fits_slong_p(v.get_mpz_t()) && sizeof(long) == 8) return static_cast<std::int64_t>(v.get_si());
  return v.get_str();
}

json to_json(const IntMatrix& m) {
  json out = json::array();
  for (const auto& row : m.rows()) {
    json r = json::array();
    for (const auto& e : row) r.push_back(to_json(e));
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const IntPolynomial& p) {
  json out = json::array();
  for (const auto& c : p.coefficients()) out.push_back(to_json(c));
  return out;
}

void write_orbit_csv(std::ostream& out, const Orbit& orbit) {
  const std::size_t d = orbit.start.dim();
  out << "k";
  for (std::size_t i = 1; i <= d; ++i) out << ",num_" << i;
  out << ",q\n";
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    const auto& p = orbit.points[k];
    out << k;
    for (const auto& v : p.numerators()) out << ',' << v.get_str();
    out << ',' << p.denominator().get_str() << '\n';
  }
}

void write_process_csv(std::ostream& out, const EmpiricalProcessGrid& grid) {
  out << "t";
  for (std::size_t i = 1; i <= grid.s_grids.size(); ++i) out << ",s_" << i;
  out << ",value\n";
  const std::size_t points = grid.s_points();
  for (std::size_t ti = 0; ti < grid.t_grid.size(); ++ti) {
    for (std::size_t j = 0; j < points; ++j) {
      out << format_double(grid.t_grid[ti]);
      for (double s : grid.level(j)) out << ',' << format_double(s);
      out << ',' << format_double(grid.at(ti, j)) << '\n';
    }
  }
}

json process_header(const EmpiricalProcessGrid& grid, std::uint64_t seed, const json& observable_spec) {
  return {{"n", grid.n}, {"seed", seed}, {"t_grid", grid.t_grid}, {"s_grids", grid.s_grids}, {"observable", observable_spec}};
}

void write_covariance_csv(std::ostream& out, const CovarianceGrid& grid) {
  const std::size_t ell = grid.levels.empty() ? 0 : grid.levels.front().size();
  out << "i,j";
  for (std::size_t c = 1; c <= ell; ++c) out << ",si_" << c;
  for (std::size_t c = 1; c <= ell; ++c) out << ",sj_" << c;
  out << ",lambda,se\n";
  for (std::size_t i = 0; i < grid.levels.size(); ++i) {
    for (std::size_t j = 0; j < grid.levels.size(); ++j) {
      out << i << ',' << j;
      for (double v : grid.levels[i]) out << ',' << format_double(v);
      for (double v : grid.levels[j]) out << ',' << format_double(v);
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      out << ',' << format_double(grid.estimates(a, b)) << ',' << format_double(grid.standard_errors(a, b)) << '\n';
    }
  }
}

}  // namespace toral
