#pragma once

// Experiment runner behind the command-line tool. Each command writes one
// output file (CSV or JSON) plus "<output>.manifest.json" holding the fully
// resolved config, library version, timestamp, status and results summary.
//
// Exit codes: 0 ok, 1 configuration error, 2 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavband/analysis.hpp"
#include "cavband/effective_hamiltonian.hpp"
#include "cavband/errors.hpp"
#include "cavband/full_model.hpp"
#include "cavband/parallel.hpp"
#include "cavband/parent_overlap.hpp"
#include "cavband/run_config.hpp"
#include "cavband/topology.hpp"
#include "cavband/version.hpp"

namespace cavband {

struct RunOutcome {
  int exit_code = 0;
  std::string status;  // ok | config_error | numerical_failure
  std::string reason;
  nlohmann::json results;
  std::string output_path;
  std::string manifest_path;
};

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_row(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt17(xs[i]);
  }
  s += '\n';
  return s;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

inline bool is_json_command(const std::string& c) {
  return c == "chern" || c == "dirac" || c == "symmetry";
}

// Field of the command when none was given.
inline double default_field(const RunConfig& c) {
  if (c.command == "dirac" || c.command == "symmetry") return (2 * c.ell + 1) * std::numbers::pi;
  return 2.0 * std::numbers::pi * c.ell;
}

inline BandSet contiguous_bands(const std::vector<int>& b, const std::string& what) {
  for (std::size_t i = 1; i < b.size(); ++i)
    if (b[i] != b[i - 1] + 1) throw ConfigError(what + ": bands must be consecutive, e.g. 2,3");
  return {b.front(), b.back()};
}

}  // namespace detail

// Fills every per-command default so the manifest echoes what actually ran.
inline RunConfig with_command_defaults(RunConfig c) {
  c.validate();
  const std::string& cmd = c.command;
  if ((cmd == "dirac" || cmd == "symmetry") && c.B && *c.B != detail::default_field(c))
    throw ConfigError(cmd + " runs at B = (2 ell + 1) pi; set ell instead of B");
  if (cmd == "gap-scan" && c.gamma) throw ConfigError("gap-scan sweeps B; give V0 rather than gamma");
  if (cmd != "gap-scan" && !c.B) c.B = detail::default_field(c);
  if (!c.V0 && !c.gamma) c.V0 = 0.1;
  if (!c.N) c.N = cmd == "jstudy" ? 6 : 8;
  if (!c.N1) c.N1 = *c.N;
  if (!c.Nw) c.Nw = cmd == "overlap" ? 60 : 12;
  if (!c.theta) c.theta = cmd == "curvature" ? 0.5 : 0.0;
  if (c.bands.empty()) {
    if (cmd == "dirac") c.bands = {1, 2};
    else if (cmd == "jstudy") c.bands = {1, 2, 3};
    else c.bands = {1};
  }
  if (c.output.empty()) c.output = cmd + (detail::is_json_command(cmd) ? ".json" : ".csv");
  c.validate();
  return c;
}

namespace detail {

inline double resolved_v0(const RunConfig& c, double B) {
  return c.V0 ? *c.V0 : *c.gamma * std::exp(0.25 * B);
}

inline nlohmann::json run_bands(const RunConfig& c, std::string& out) {
  const double B = *c.B;
  const auto p = EffectiveParams::from_v0(resolved_v0(c, B), B, *c.theta);
  const PlaneWaveBasis basis(*c.N);
  const int count = std::min(8, basis.dim());
  const int g = c.grid;
  std::vector<Eigen::VectorXd> e(static_cast<std::size_t>(g) * g);
  parallel_for(e.size(), c.threads, [&](std::size_t i) {
    e[i] = bands(p, {double(i / g) / g, double(i % g) / g}, basis, count);
  });
  out = "k1,k2";
  for (int j = 1; j <= count; ++j) out += ",E" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<double> row{double(i / g) / g, double(i % g) / g};
    row.insert(row.end(), e[i].data(), e[i].data() + count);
    out += csv_row(row);
  }
  return {{"points", e.size()}, {"bands_per_point", count}};
}

inline nlohmann::json run_gap_scan(const RunConfig& c, std::string& out) {
  std::vector<double> Bs(c.steps);
  for (int i = 0; i < c.steps; ++i)
    Bs[i] = c.steps == 1 ? c.B_min : c.B_min + (c.B_max - c.B_min) * i / (c.steps - 1);
  GapScanOptions opt;
  opt.threads = c.threads;
  const auto scan = gap_scan(*c.V0, Bs, PlaneWaveBasis(*c.N), opt);
  out = "B,g_numeric,g_perturbative,k1_min,k2_min\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < Bs.size(); ++i) {
    out += csv_row({Bs[i], scan.g_numeric[i], scan.g_perturbative[i], scan.k_argmin[i].k1, scan.k_argmin[i].k2});
    worst = std::max(worst, std::abs(scan.g_numeric[i] - scan.g_perturbative[i]));
  }
  return {{"points", Bs.size()}, {"max_abs_deviation", worst}};
}

inline nlohmann::json chern_json(const ChernReport& r) {
  return {{"chern", r.chern},       {"chern_raw", r.chern_raw},   {"min_gap", r.min_gap},
          {"valid", r.valid},       {"reason", r.reason},         {"band_first", r.band_set.first},
          {"band_last", r.band_set.last}, {"max_sewing_loss", r.max_sewing_loss}};
}

inline nlohmann::json run_chern(const RunConfig& c, std::string& out) {
  const double B = *c.B;
  const auto p = EffectiveParams::from_v0(resolved_v0(c, B), B, *c.theta);
  ChernOptions opt;
  opt.threads = c.threads;
  opt.seed = c.seed;
  const auto rep = chern_number(p, contiguous_bands(c.bands, "chern"), KGrid(c.Ng), PlaneWaveBasis(*c.N), opt);
  const auto j = chern_json(rep);
  out = j.dump(2) + "\n";
  if (!rep.valid) throw NumericalError(rep.reason, "band set is not isolated on the grid");
  return j;
}

inline nlohmann::json run_curvature(const RunConfig& c, std::string& out) {
  if (c.bands.size() != 1) throw ConfigError("curvature: give exactly one band");
  const double B = *c.B;
  const auto p = EffectiveParams::from_v0(resolved_v0(c, B), B, *c.theta);
  ChernOptions opt;
  opt.threads = c.threads;
  const auto map = berry_curvature_map(p, c.bands.front(), KGrid(c.Ng), PlaneWaveBasis(*c.N), opt);
  std::ostringstream os;
  write_curvature_csv(map, os);
  out = os.str();
  return {{"normalization", "per-area"},
          {"integral_over_2pi", map.integral() / (2.0 * std::numbers::pi)},
          {"chern", map.report.chern},
          {"mass_near_integer_lines", curvature_mass_near_lines(map, 0.0, 0.1)},
          {"mass_near_half_integer_lines", curvature_mass_near_lines(map, 0.5, 0.1)}};
}

inline nlohmann::json run_dirac(const RunConfig& c, std::string& out) {
  if (c.bands.size() != 2) throw ConfigError("dirac: give the band pair, e.g. 1,2");
  const double V0 = resolved_v0(c, *c.B);
  const auto fit = dirac_fit(V0, c.ell, {c.bands[0], c.bands[1]},
                             default_cone_radii(V0 * std::exp(-*c.B / 4)), default_cone_directions(),
                             PlaneWaveBasis(*c.N));
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& [d, s] : fit.directional_slopes) slopes.push_back({{"d1", d.x()}, {"d2", d.y()}, {"slope", s}});
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(fit.quadratic_form);
  nlohmann::json j{{"E0", fit.E0},
                   {"pair", {fit.pair.first, fit.pair.second}},
                   {"directional_slopes", slopes},
                   {"quadratic_form", {{fit.quadratic_form(0, 0), fit.quadratic_form(0, 1)},
                                       {fit.quadratic_form(1, 0), fit.quadratic_form(1, 1)}}},
                   {"quadratic_form_eigenvalues", {es.eigenvalues()(0), es.eigenvalues()(1)}},
                   {"max_relative_residual", fit.max_relative_residual},
                   {"nonlinear_warning", fit.nonlinear_warning},
                   {"k0_clusters", fit.k0_clusters}};
  out = j.dump(2) + "\n";
  return j;
}

inline nlohmann::json run_jstudy(const RunConfig& c, std::string& out) {
  const double B = *c.B;
  const auto res = j_convergence_study(standard_potential(resolved_v0(c, B)), B, {c.k1, c.k2}, c.bands, c.J_values,
                                       PlaneWaveBasis(*c.N), *c.Nw, c.threads);
  out = "J,band,E_full,E_eff,abs_diff\n";
  for (const auto& r : res.rows) out += csv_row({r.J, double(r.band), r.E_full, r.E_eff, r.abs_diff});
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : res.fits) {
    nlohmann::json jf{{"band", f.band}, {"below_noise", f.below_noise}};
    if (!f.below_noise) jf["slope"] = f.slope, jf["intercept"] = f.intercept;
    fits.push_back(jf);
  }
  return {{"fits", fits}};
}

inline nlohmann::json run_overlap(const RunConfig& c, std::string& out) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  out = "k1,k2,k1p,k2p,re_numeric,im_numeric,re_closed,im_closed,deviation\n";
  double worst = 0.0;
  for (int i = 0; i < c.samples; ++i) {
    const BlochMomentum k{u(rng), u(rng)}, kp{u(rng), u(rng)};
    const auto r = parent_overlap_check(*c.B, k, kp, *c.Nw);
    worst = std::max(worst, r.deviation);
    out += csv_row({k.k1, k.k2, kp.k1, kp.k2, r.numeric.real(), r.numeric.imag(), r.closed_form.real(),
                    r.closed_form.imag(), r.deviation});
  }
  return {{"samples", c.samples}, {"max_deviation", worst}};
}

inline nlohmann::json run_symmetry(const RunConfig& c, std::string& out) {
  const double B = *c.B;
  const auto rep = symmetry_check(EffectiveParams::from_v0(resolved_v0(c, B), B), PlaneWaveBasis(*c.N));
  std::vector<double> ev(rep.eigenvalues.data(), rep.eigenvalues.data() + rep.eigenvalues.size());
  nlohmann::json j{{"s0_square_defect", rep.s0_square_defect},
                   {"s1_square_defect", rep.s1_square_defect},
                   {"anticommutator", rep.anticommutator},
                   {"commutator_S0", rep.commutator0},
                   {"commutator_S1", rep.commutator1},
                   {"eigenvalues", ev},
                   {"clusters", rep.clusters},
                   {"max_pair_spread", rep.max_pair_spread}};
  out = j.dump(2) + "\n";
  return j;
}

}  // namespace detail

inline RunOutcome run(const RunConfig& requested, std::ostream& log) {
  RunOutcome outcome;
  RunConfig cfg;
  try {
    cfg = with_command_defaults(requested);
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return {1, "config_error", e.what(), {}, {}, {}};
  }
  outcome.output_path = cfg.output;
  outcome.manifest_path = cfg.output + ".manifest.json";

  std::string body;
  try {
    const std::string& cmd = cfg.command;
    if (cmd == "bands") outcome.results = detail::run_bands(cfg, body);
    else if (cmd == "gap-scan") outcome.results = detail::run_gap_scan(cfg, body);
    else if (cmd == "chern") outcome.results = detail::run_chern(cfg, body);
    else if (cmd == "curvature") outcome.results = detail::run_curvature(cfg, body);
    else if (cmd == "dirac") outcome.results = detail::run_dirac(cfg, body);
    else if (cmd == "jstudy") outcome.results = detail::run_jstudy(cfg, body);
    else if (cmd == "overlap") outcome.results = detail::run_overlap(cfg, body);
    else outcome.results = detail::run_symmetry(cfg, body);
    outcome.status = "ok";
  } catch (const NumericalError& e) {
    outcome = {2, "numerical_failure", e.reason(), outcome.results, outcome.output_path, outcome.manifest_path};
    log << "numerical failure (" << e.reason() << "): " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    outcome = {1, "config_error", e.what(), {}, outcome.output_path, outcome.manifest_path};
    log << "config error: " << e.what() << '\n';
  }

  nlohmann::json manifest{{"version", kVersion},
                          {"timestamp", detail::utc_timestamp()},
                          {"config", to_json(cfg)},
                          {"status", outcome.status},
                          {"reason", outcome.reason},
                          {"output", cfg.output},
                          {"results", outcome.results}};
  try {
    if (!body.empty()) detail::write_text(cfg.output, body);
    detail::write_text(outcome.manifest_path, manifest.dump(2) + "\n");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return {1, "config_error", e.what(), outcome.results, outcome.output_path, {}};
  }
  if (outcome.exit_code == 0) log << cfg.command << ": wrote " << cfg.output << '\n';
  return outcome;
}

}  // namespace cavband
