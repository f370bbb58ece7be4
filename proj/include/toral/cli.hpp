#pragma once

// Command-line front end. Every subcommand reads one RunConfig, assembled
// from defaults, then an optional JSON file (--config), then flags.
//
// Exit codes: 0 success (test verdicts live in the report's pass flags);
// 2 the request is malformed (bad flags or file, invalid matrix, arguments
// out of range); 1 the computation could not proceed, including a map that
// is not ergodic or an observable whose regularity cannot be certified.
// Every report carries the resolved configuration under "run_config".

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace toral::cli {

struct RunConfig {
  std::string matrix = "2,1;1,1";
  /// Observable configuration; null means cos(2 pi x_1).
  nlohmann::json observable;
  std::string q = "2305843009213693951";
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out_dir;
  double tol = 1e-9;

  std::size_t n = 4096;
  std::size_t replicates = 2000;
  std::size_t lag_cutoff = 30;
  std::size_t target_orbits = 64;
  std::size_t target_length = 16384;
  std::size_t reference_samples = 1000000;
  double significance = 0.01;
  double variance_band = 0.1;
  double frobenius_band = 0.15;
  std::string mode = "partial_sum";
  std::vector<double> s;
  std::vector<std::vector<double>> s_list;
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t s_levels = 64;
  /// Support bound for integrals in s; 0 picks it from the data.
  double M = 0.0;
  double p = 4.0;
  std::vector<std::size_t> n_list{256, 512, 1024, 2048, 4096, 8192, 16384};
  std::size_t n_orbits = 64;
  int ell = 1;
  double alpha = 1.0;
  /// Orbit start numerators; empty draws a random point.
  std::vector<std::string> start;
  std::string format = "json";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Keys missing from j keep their current value in `base`; unknown keys or
/// wrong types throw ConfigError.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toral::cli
