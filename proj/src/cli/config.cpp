#include <type_traits>

#include "toral/cli.hpp"
#include "toral/error.hpp"

namespace toral::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return {{"matrix", c.matrix},
          {"observable", c.observable},
          {"q", c.q},
          {"seed", c.seed},
          {"threads", c.threads},
          {"out_dir", c.out_dir},
          {"tol", c.tol},
          {"n", c.n},
          {"replicates", c.replicates},
          {"lag_cutoff", c.lag_cutoff},
          {"target_orbits", c.target_orbits},
          {"target_length", c.target_length},
          {"reference_samples", c.reference_samples},
          {"significance", c.significance},
          {"variance_band", c.variance_band},
          {"frobenius_band", c.frobenius_band},
          {"mode", c.mode},
          {"s", c.s},
          {"s_list", c.s_list},
          {"t_grid", c.t_grid},
          {"s_levels", c.s_levels},
          {"M", c.M},
          {"p", c.p},
          {"n_list", c.n_list},
          {"n_orbits", c.n_orbits},
          {"ell", c.ell},
          {"alpha", c.alpha},
          {"start", c.start},
          {"format", c.format}};
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw Error(Errc::ConfigError, std::string("config key '") + key + "' must be an integer");
    if constexpr (std::is_unsigned_v<T>)
      if (!it->is_number_unsigned()) throw Error(Errc::ConfigError, std::string("config key '") + key + "' must be nonnegative");
  }
  try {
    field = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(Errc::ConfigError, "configuration must be a JSON object");
  const auto known = to_json(RunConfig{});
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw Error(Errc::ConfigError, "unknown config key '" + key + "'");

  if (const auto it = j.find("matrix"); it != j.end()) {
    if (it->is_string()) c.matrix = it->get<std::string>();
    else if (it->is_array()) c.matrix = it->dump();
    else throw Error(Errc::ConfigError, "config key 'matrix' must be a string or an array of rows");
  }
  if (const auto it = j.find("observable"); it != j.end()) {
    if (!it->is_null() && !it->is_object()) throw Error(Errc::ConfigError, "config key 'observable' must be an object");
    c.observable = *it;
  }
  if (const auto it = j.find("q"); it != j.end()) {
    if (it->is_string()) c.q = it->get<std::string>();
    else if (it->is_number_unsigned() || it->is_number_integer()) c.q = it->dump();
    else throw Error(Errc::ConfigError, "config key 'q' must be an integer or a decimal string");
  }
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  read(j, "out_dir", c.out_dir);
  read(j, "tol", c.tol);
  read(j, "n", c.n);
  read(j, "replicates", c.replicates);
  read(j, "lag_cutoff", c.lag_cutoff);
  read(j, "target_orbits", c.target_orbits);
  read(j, "target_length", c.target_length);
  read(j, "reference_samples", c.reference_samples);
  read(j, "significance", c.significance);
  read(j, "variance_band", c.variance_band);
  read(j, "frobenius_band", c.frobenius_band);
  read(j, "mode", c.mode);
  read(j, "s", c.s);
  read(j, "s_list", c.s_list);
  read(j, "t_grid", c.t_grid);
  read(j, "s_levels", c.s_levels);
  read(j, "M", c.M);
  read(j, "p", c.p);
  read(j, "n_list", c.n_list);
  read(j, "n_orbits", c.n_orbits);
  read(j, "ell", c.ell);
  read(j, "alpha", c.alpha);
  read(j, "start", c.start);
  read(j, "format", c.format);
  return c;
}

}  // namespace toral::cli
