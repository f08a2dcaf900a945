#pragma once

// Resolved configuration of one CLI run. Sources are layered: built-in
// defaults, then a JSON config file, then explicit command-line flags.
// Fields left unset fall back to per-command defaults in the runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cavband {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::array<std::string_view, 8> kCommands{"bands",  "gap-scan", "chern",   "curvature",
                                                           "dirac",  "jstudy",   "overlap", "symmetry"};

struct RunConfig {
  std::string command;
  std::optional<double> V0;
  std::optional<double> gamma;  // alternative to V0: the smoothed coupling V0 e^{-B/4}
  std::optional<double> B;
  double B_min = 0.0;
  double B_max = 25.0;
  int steps = 200;
  int ell = 1;
  std::optional<int> N;
  std::optional<int> N1;
  std::optional<int> Nw;
  int Ng = 24;
  std::optional<double> theta;
  std::vector<double> J_values{50.0, 100.0, 200.0, 400.0};
  std::vector<int> bands;
  int grid = 32;
  double k1 = 0.25;
  double k2 = 0.4;
  int samples = 20;
  std::string output;
  unsigned seed = 12345;
  unsigned threads = 0;

  void validate() const {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
      throw ConfigError("unknown command '" + command + "'");
    if (V0 && gamma) throw ConfigError("give either V0 or gamma, not both");
    auto finite = [](std::optional<double> x, const char* name) {
      if (x && !std::isfinite(*x)) throw ConfigError(std::string(name) + " must be finite");
    };
    finite(V0, "V0");
    finite(gamma, "gamma");
    if (B && !(*B >= 0.0 && std::isfinite(*B))) throw ConfigError("B must be >= 0");
    if (!(B_min >= 0.0) || !(B_max >= B_min)) throw ConfigError("need 0 <= B_min <= B_max");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (ell < 0) throw ConfigError("ell must be >= 0");
    if (N && *N < 2) throw ConfigError("N must be >= 2");
    if (N1 && *N1 < 1) throw ConfigError("N1 must be >= 1");
    if (Nw && *Nw < 0) throw ConfigError("Nw must be >= 0");
    if (Ng < 4) throw ConfigError("Ng must be >= 4");
    if (theta && !(*theta >= 0.0 && *theta <= 1.0)) throw ConfigError("theta must lie in [0,1]");
    if (J_values.empty()) throw ConfigError("J list is empty");
    for (double j : J_values)
      if (!(j > 0.0)) throw ConfigError("J values must be > 0");
    for (int b : bands)
      if (b < 1) throw ConfigError("band indices are 1-based");
    if (grid < 1) throw ConfigError("grid must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
  }
};

namespace detail {

template <class T>
T json_get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

// Applies every key of `j` on top of `cfg`. Unknown keys are rejected.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  using detail::json_get;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("V0") && j.contains("gamma")) throw ConfigError("give either V0 or gamma, not both");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") cfg.command = json_get<std::string>(v, key);
    else if (key == "V0") cfg.V0 = json_get<double>(v, key), cfg.gamma.reset();
    else if (key == "gamma") cfg.gamma = json_get<double>(v, key), cfg.V0.reset();
    else if (key == "B") cfg.B = json_get<double>(v, key);
    else if (key == "B_min") cfg.B_min = json_get<double>(v, key);
    else if (key == "B_max") cfg.B_max = json_get<double>(v, key);
    else if (key == "steps") cfg.steps = json_get<int>(v, key);
    else if (key == "ell") cfg.ell = json_get<int>(v, key);
    else if (key == "N") cfg.N = json_get<int>(v, key);
    else if (key == "N1") cfg.N1 = json_get<int>(v, key);
    else if (key == "Nw") cfg.Nw = json_get<int>(v, key);
    else if (key == "Ng") cfg.Ng = json_get<int>(v, key);
    else if (key == "theta") cfg.theta = json_get<double>(v, key);
    else if (key == "J") cfg.J_values = json_get<std::vector<double>>(v, key);
    else if (key == "bands") cfg.bands = json_get<std::vector<int>>(v, key);
    else if (key == "grid") cfg.grid = json_get<int>(v, key);
    else if (key == "k1") cfg.k1 = json_get<double>(v, key);
    else if (key == "k2") cfg.k2 = json_get<double>(v, key);
    else if (key == "samples") cfg.samples = json_get<int>(v, key);
    else if (key == "output") cfg.output = json_get<std::string>(v, key);
    else if (key == "seed") cfg.seed = json_get<unsigned>(v, key);
    else if (key == "threads") cfg.threads = json_get<unsigned>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"command", c.command}, {"B_min", c.B_min}, {"B_max", c.B_max}, {"steps", c.steps},
                   {"ell", c.ell},         {"Ng", c.Ng},       {"J", c.J_values},   {"bands", c.bands},
                   {"grid", c.grid},       {"k1", c.k1},       {"k2", c.k2},        {"samples", c.samples},
                   {"output", c.output},   {"seed", c.seed},   {"threads", c.threads}};
  auto opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  opt("V0", c.V0);
  opt("gamma", c.gamma);
  opt("B", c.B);
  opt("N", c.N);
  opt("N1", c.N1);
  opt("Nw", c.Nw);
  opt("theta", c.theta);
  return j;
}

// defaults <- config file <- explicit flags, then validation.
inline RunConfig resolve_config(const std::string& command, const nlohmann::json& file,
                                const nlohmann::json& flags) {
  RunConfig cfg;
  cfg.command = command;
  if (!file.is_null()) apply_json(cfg, file);
  if (!flags.is_null()) apply_json(cfg, flags);
  if (cfg.command != command)
    throw ConfigError("config file names command '" + cfg.command + "' but '" + command + "' was invoked");
  cfg.validate();
  return cfg;
}

}  // namespace cavband
