#pragma once

// Experiment drivers for V = V0 (cos x1 + cos x2): gap scans against the
// leading perturbative gap, the S0/S1 symmetry at k0 = (1/2, 1/2) for
// B = (2ℓ+1)π, Dirac-cone fits, and the four-level spectrum at k0.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/errors.hpp"
#include "cavband/parallel.hpp"
#include "cavband/spectral.hpp"

namespace cavband {

inline constexpr BlochMomentum kCorner{0.5, 0.5};

// |V0| e^{-B/4} | |cos(B/4)| - |sin(B/4)| |
inline double perturbative_gap(double V0, double B) {
  return std::abs(V0) * std::exp(-0.25 * B) * std::abs(std::abs(std::cos(0.25 * B)) - std::abs(std::sin(0.25 * B)));
}

struct GapScanOptions {
  int coarse = 16;          // coarse grid per axis
  int refine_rounds = 5;
  double shrink = 4.0;      // search box shrink per round
  int stencil = 2;          // (2*stencil+1)² points per round
  unsigned threads = 0;
};

struct GapScan {
  std::vector<double> B_values;
  std::vector<double> g_numeric;
  std::vector<double> g_perturbative;
  std::vector<BlochMomentum> k_argmin;
};

// E2 - E1 at k for the effective problem of V0 at field B.
inline double band_gap_at(const EffectiveParams& p, BlochMomentum k, const PlaneWaveBasis& basis) {
  const auto e = bands(p, k, basis, 2);
  return e(1) - e(0);
}

// Minimum over k of E2 - E1: coarse grid, then coordinate search on a
// shrinking box around the incumbent.
inline std::pair<double, BlochMomentum> minimize_gap(const EffectiveParams& p, const PlaneWaveBasis& basis,
                                                     const GapScanOptions& opt) {
  double best = std::numeric_limits<double>::infinity();
  BlochMomentum arg{};
  for (int a = 0; a < opt.coarse; ++a)
    for (int b = 0; b < opt.coarse; ++b) {
      const BlochMomentum k{double(a) / opt.coarse, double(b) / opt.coarse};
      const double g = band_gap_at(p, k, basis);
      if (g < best) best = g, arg = k;
    }
  double half = 1.0 / opt.coarse;
  for (int r = 0; r < opt.refine_rounds; ++r) {
    const double step = half / opt.stencil;
    const BlochMomentum centre = arg;
    for (int i = -opt.stencil; i <= opt.stencil; ++i)
      for (int j = -opt.stencil; j <= opt.stencil; ++j) {
        if (i == 0 && j == 0) continue;
        const BlochMomentum k = BlochMomentum{centre.k1 + i * step, centre.k2 + j * step}.reduced();
        const double g = band_gap_at(p, k, basis);
        if (g < best) best = g, arg = k;
      }
    half /= opt.shrink;
  }
  return {best, arg};
}

inline GapScan gap_scan(double V0, const std::vector<double>& B_values, const PlaneWaveBasis& basis,
                        const GapScanOptions& opt = {}) {
  GapScan scan;
  scan.B_values = B_values;
  const std::size_t n = B_values.size();
  scan.g_numeric.resize(n);
  scan.g_perturbative.resize(n);
  scan.k_argmin.resize(n);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    const auto [g, k] = minimize_gap(EffectiveParams::from_v0(V0, B_values[i]), basis, opt);
    scan.g_numeric[i] = g;
    scan.k_argmin[i] = k;
    scan.g_perturbative[i] = perturbative_gap(V0, B_values[i]);
  });
  return scan;
}

// S0 e_m = (-1)^{m1} e_{(m1, 1-m2)},  S1 e_m = e_{(1-m1, 1-m2)}.
// Images leaving the truncation are dropped, so identities are checked
// only on `interior` modes.
struct SymmetryMatrices {
  MatrixXc S0;
  MatrixXc S1;
  std::vector<int> interior;  // basis indices whose checks are exact
};

inline SymmetryMatrices symmetry_matrices(const PlaneWaveBasis& basis, int coupling_reach = 1) {
  const int dim = basis.dim(), N = basis.cutoff();
  SymmetryMatrices s{MatrixXc::Zero(dim, dim), MatrixXc::Zero(dim, dim), {}};
  for (int i = 0; i < dim; ++i) {
    const FreqVector m = basis.mode(i);
    if (auto j = basis.index({m.n1, 1 - m.n2})) s.S0(*j, i) = (m.n1 % 2 == 0) ? 1.0 : -1.0;
    if (auto j = basis.index({1 - m.n1, 1 - m.n2})) s.S1(*j, i) = 1.0;
    const int lo = -N + 1 + coupling_reach, hi = N - coupling_reach;
    if (m.n1 >= lo && m.n1 <= hi && m.n2 >= lo && m.n2 <= hi) s.interior.push_back(i);
  }
  return s;
}

struct SymmetryReport {
  double s0_square_defect = 0.0;   // ‖S0² - I‖ on the interior
  double s1_square_defect = 0.0;
  double anticommutator = 0.0;     // ‖S1 S0 + S0 S1‖ on the interior
  double commutator0 = 0.0;        // ‖[H, S0]‖ / ‖H‖ on the interior
  double commutator1 = 0.0;
  Eigen::VectorXd eigenvalues;     // lowest eigenvalues of H(k0)
  std::vector<std::vector<int>> clusters;
  double max_pair_spread = 0.0;    // max over i of E_{2i+2} - E_{2i+1}
};

inline SymmetryReport symmetry_check(const EffectiveParams& p, const PlaneWaveBasis& basis, int n_eigs = 8,
                                     double cluster_tol = 1e-9) {
  if (n_eigs < 2 || n_eigs % 2) throw std::invalid_argument("symmetry_check: n_eigs must be even and >= 2");
  const auto sym = symmetry_matrices(basis, std::max(1, p.W.max_freq()));
  const MatrixXc h = build_h_eff(p, kCorner, basis);
  auto restricted_norm = [&](const MatrixXc& m) {
    double s = 0.0;
    for (int i : sym.interior)
      for (int j : sym.interior) s += std::norm(m(i, j));
    return std::sqrt(s);
  };
  const MatrixXc id = MatrixXc::Identity(basis.dim(), basis.dim());
  SymmetryReport rep;
  rep.s0_square_defect = restricted_norm(sym.S0 * sym.S0 - id);
  rep.s1_square_defect = restricted_norm(sym.S1 * sym.S1 - id);
  rep.anticommutator = restricted_norm(sym.S1 * sym.S0 + sym.S0 * sym.S1);
  const double hnorm = std::max(h.norm(), 1e-300);
  rep.commutator0 = restricted_norm(h * sym.S0 - sym.S0 * h) / hnorm;
  rep.commutator1 = restricted_norm(h * sym.S1 - sym.S1 * h) / hnorm;
  rep.eigenvalues = eigvalsh_lowest(h, n_eigs);
  rep.clusters = cluster_degeneracies(rep.eigenvalues, cluster_tol);
  for (int i = 0; i + 1 < n_eigs; i += 2)
    rep.max_pair_spread = std::max(rep.max_pair_spread, rep.eigenvalues(i + 1) - rep.eigenvalues(i));
  return rep;
}

struct ConeFit {
  double E0 = 0.0;
  std::pair<int, int> pair{1, 2};
  std::vector<std::pair<Eigen::Vector2d, double>> directional_slopes;
  Eigen::Matrix2d quadratic_form = Eigen::Matrix2d::Zero();  // s(d)² = <A d, d>
  double max_relative_residual = 0.0;  // of the through-origin linear fits
  bool nonlinear_warning = false;      // residual above 5%: radii too wide
  std::vector<std::vector<int>> k0_clusters;  // degeneracies among the lowest bands at k0 (0-based)
};

// The cone is linear only for |k - k0| well below the smoothed coupling
// gamma, so radii scale with it.
inline std::vector<double> default_cone_radii(double gamma) {
  const double g = gamma != 0.0 ? std::abs(gamma) : 1.0;
  return {1e-3 * g, 2e-3 * g, 4e-3 * g};
}

inline std::vector<Eigen::Vector2d> default_cone_directions() {
  const double h = std::numbers::sqrt2 / 2;
  return {{1.0, 0.0}, {0.0, 1.0}, {h, h}, {h, -h}};
}

// Half-splitting (E_upper - E_lower)/2 along k0 + r d is fitted as s(d) r;
// A is then the least-squares solution of s(d)² = <A d, d>.
inline ConeFit dirac_fit(double V0, int ell, std::pair<int, int> pair, const std::vector<double>& radii,
                         const std::vector<Eigen::Vector2d>& directions, const PlaneWaveBasis& basis) {
  if (ell < 0) throw std::invalid_argument("dirac_fit: ell must be >= 0");
  if (pair.second != pair.first + 1 || pair.first < 1)
    throw std::invalid_argument("dirac_fit: pair must be adjacent bands (p, p+1)");
  if (radii.empty() || directions.size() < 3)
    throw std::invalid_argument("dirac_fit: need radii and at least three directions");
  const double B0 = (2 * ell + 1) * std::numbers::pi;
  const auto p = EffectiveParams::from_v0(V0, B0);
  const int count = std::max(pair.second, 4);
  const auto e0 = bands(p, kCorner, basis, count);
  const int lo = pair.first - 1, up = pair.second - 1;

  ConeFit fit;
  fit.pair = pair;
  fit.k0_clusters = cluster_degeneracies(e0, 1e-9);
  if (std::abs(e0(up) - e0(lo)) > 1e-9)
    throw NumericalError("no_degeneracy", "dirac_fit: bands " + std::to_string(pair.first) + "," +
                                              std::to_string(pair.second) + " are not degenerate at k0");
  fit.E0 = 0.5 * (e0(lo) + e0(up));

  Eigen::MatrixXd design(directions.size(), 3);
  Eigen::VectorXd rhs(directions.size());
  for (std::size_t di = 0; di < directions.size(); ++di) {
    const Eigen::Vector2d d = directions[di].normalized();
    std::vector<double> s(radii.size());
    double num = 0.0, den = 0.0;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double r = radii[ri];
      const auto e = bands(p, {kCorner.k1 + r * d.x(), kCorner.k2 + r * d.y()}, basis, pair.second);
      s[ri] = 0.5 * (e(up) - e(lo));
      num += r * s[ri];
      den += r * r;
    }
    const double slope = num / den;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double model = slope * radii[ri];
      if (model > 0.0) fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(s[ri] - model) / model);
    }
    fit.directional_slopes.emplace_back(d, slope);
    design.row(di) << d.x() * d.x(), 2.0 * d.x() * d.y(), d.y() * d.y();
    rhs(di) = slope * slope;
  }
  const Eigen::Vector3d a = design.colPivHouseholderQr().solve(rhs);
  fit.quadratic_form << a(0), a(1), a(1), a(2);
  fit.nonlinear_warning = fit.max_relative_residual > 0.05;
  return fit;
}

// max_j |E_j(k0) - (1/2 + μ_j)|, μ = sorted {±γ cos(B/4), ±γ sin(B/4)}, γ = V0 e^{-B/4}.
inline double four_level_check(double V0, double B, const PlaneWaveBasis& basis) {
  const double gamma = V0 * std::exp(-0.25 * B);
  if (std::abs(gamma) > 0.1) throw std::invalid_argument("four_level_check: requires |V0 e^{-B/4}| <= 0.1");
  const auto e = bands(EffectiveParams::from_v0(V0, B), kCorner, basis, 4);
  std::array<double, 4> predicted{0.5 + gamma * std::cos(0.25 * B), 0.5 - gamma * std::cos(0.25 * B),
                                  0.5 + gamma * std::sin(0.25 * B), 0.5 - gamma * std::sin(0.25 * B)};
  std::sort(predicted.begin(), predicted.end());
  double dev = 0.0;
  for (int j = 0; j < 4; ++j) dev = std::max(dev, std::abs(e(j) - predicted[j]));
  return dev;
}

}  // namespace cavband
