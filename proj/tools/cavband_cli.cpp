// Command-line front end: parses flags, layers them over an optional JSON
// config and hands the result to cavband::run.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cavband/run.hpp"
#include "cavband/version.hpp"

namespace {

// Options of one subcommand; only flags actually given reach the JSON layer.
struct FlagSet {
  std::vector<std::pair<CLI::Option*, std::function<void(nlohmann::json&)>>> entries;
  std::string config_path;

  double V0 = 0, gamma = 0, B = 0, B_min = 0, B_max = 0, theta = 0, k1 = 0, k2 = 0;
  int steps = 0, ell = 0, N = 0, N1 = 0, Nw = 0, Ng = 0, grid = 0, samples = 0;
  unsigned seed = 0, threads = 0;
  std::vector<double> J;
  std::vector<int> bands;
  std::string output;

  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, T& slot, const std::string& help) {
    auto* opt = app->add_option(flag, slot, help);
    if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>)
      opt->delimiter(',');
    entries.emplace_back(opt, [&slot, key](nlohmann::json& j) { j[key] = slot; });
  }

  void attach(CLI::App* app) {
    add(app, "--V0", "V0", V0, "potential amplitude in V0 (cos x1 + cos x2)");
    add(app, "--gamma", "gamma", gamma, "smoothed amplitude V0 exp(-B/4), instead of --V0");
    add(app, "--B", "B", B, "magnetic field");
    add(app, "--B-min", "B_min", B_min, "gap-scan: first field");
    add(app, "--B-max", "B_max", B_max, "gap-scan: last field");
    add(app, "--steps", "steps", steps, "gap-scan: number of fields");
    add(app, "--ell", "ell", ell, "field index: B = 2 pi ell, or (2 ell + 1) pi for dirac/symmetry");
    add(app, "--N", "N", N, "plane-wave cutoff |m_i| <= N");
    add(app, "--N1", "N1", N1, "1D Fourier cutoff");
    add(app, "--Nw", "Nw", Nw, "Hermite cutoff");
    add(app, "--Ng", "Ng", Ng, "k-grid size for chern/curvature");
    add(app, "--theta", "theta", theta, "gauge parameter in [0,1]");
    add(app, "--J", "J", J, "comma-separated photon energies");
    add(app, "--bands", "bands", bands, "comma-separated 1-based band indices");
    add(app, "--grid", "grid", grid, "bands: k-points per axis");
    add(app, "--k1", "k1", k1, "jstudy: quasi-momentum");
    add(app, "--k2", "k2", k2, "jstudy: quasi-momentum");
    add(app, "--samples", "samples", samples, "overlap: random (k, k') pairs");
    add(app, "--output", "output", output, "output file; the manifest goes to <output>.manifest.json");
    add(app, "--seed", "seed", seed, "RNG seed");
    add(app, "--threads", "threads", threads, "worker threads (0: hardware count)");
    app->add_option("--config", config_path, "JSON config; explicit flags take precedence");
  }

  nlohmann::json given() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [opt, put] : entries)
      if (opt->count() > 0) put(j);
    return j;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, topology and large-J experiments for a cavity-coupled magnetic Bloch problem"};
  app.set_version_flag("--version", cavband::kVersion);
  app.require_subcommand(1);

  std::map<std::string, FlagSet> flags;
  const std::map<std::string, std::string> about{
      {"bands", "band energies E1..E8 on a k-grid"},
      {"gap-scan", "minimal E2 - E1 over k for a range of B"},
      {"chern", "Chern number of a contiguous band set"},
      {"curvature", "Berry curvature map of one band"},
      {"dirac", "cone fit at k0 = (1/2, 1/2), B = (2 ell + 1) pi"},
      {"jstudy", "full model against the effective model as J grows"},
      {"overlap", "parent-state overlaps against their closed form"},
      {"symmetry", "S0/S1 checks and eigenvalue pairing at k0"}};
  for (auto name : cavband::kCommands) {
    const std::string n(name);
    flags[n].attach(app.add_subcommand(n, about.at(n)));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const FlagSet& f = flags.at(command);
  try {
    nlohmann::json file;
    if (!f.config_path.empty()) {
      std::ifstream is(f.config_path);
      if (!is) throw cavband::ConfigError("cannot read config '" + f.config_path + "'");
      try {
        file = nlohmann::json::parse(is);
      } catch (const nlohmann::json::parse_error& e) {
        throw cavband::ConfigError("config '" + f.config_path + "' is not valid JSON: " + e.what());
      }
    }
    const auto cfg = cavband::resolve_config(command, file, f.given());
    return cavband::run(cfg, std::cout).exit_code;
  } catch (const cavband::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
}
