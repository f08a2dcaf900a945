#pragma once

// Chern numbers and Berry curvature of isolated band groups over the
// Brillouin torus R²/Z², by the gauge-invariant link-variable method.
//
// Links are arg det of the |S|×|S| overlap M_ij = <u_i(k), u_j(k')>, with
// the inner product <u, v> = Σ u conj(v). Across the torus boundary the
// target frame is first carried back by the Fourier index shift
// u(k + p) = e^{i<x,p>} u(k). With these conventions the plaquette phase
// approximates B(k) dk1 dk2, B(k) = 2 Im <∂_{k1}u, ∂_{k2}u>, and
// c1 = (1/2π) Σ phases.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/errors.hpp"
#include "cavband/parallel.hpp"
#include "cavband/spectral.hpp"

namespace cavband {

struct KGrid {
  int Ng = 24;

  explicit KGrid(int ng) : Ng(ng) {
    if (ng < 4) throw std::invalid_argument("KGrid: Ng must be >= 4");
  }
  BlochMomentum point(int a, int b) const { return {double(a) / Ng, double(b) / Ng}; }
};

// Contiguous 1-based band range [first, last].
struct BandSet {
  int first = 1;
  int last = 1;

  int size() const { return last - first + 1; }
  void validate() const {
    if (first < 1 || last < first) throw std::invalid_argument("BandSet: need 1 <= first <= last");
  }
};

struct ChernOptions {
  double gap_tol = 1e-6;
  double det_tol = 1e-8;
  // Multiply every eigenvector by a random unit phase before linking.
  bool randomize_phases = false;
  unsigned seed = 12345;
  unsigned threads = 0;  // 0: hardware count
};

struct ChernReport {
  int chern = 0;
  double chern_raw = 0.0;             // (1/2π) Σ plaquette phases
  Eigen::MatrixXd plaquette_phases;   // (a, b) -> phase of plaquette with corner k_{ab}
  double min_gap = 0.0;
  BandSet band_set;
  bool valid = false;
  std::string reason;                  // why the report is invalid
  double max_sewing_loss = 0.0;        // truncation loss of boundary index shifts
};

namespace detail {

struct FrameGrid {
  std::vector<MatrixXc> frames;  // Ng*Ng, index a*Ng + b, |S| columns each
  double min_gap = 0.0;
};

inline FrameGrid compute_frames(const EffectiveParams& p, BandSet s, const KGrid& grid,
                                const PlaneWaveBasis& basis, const ChernOptions& opt) {
  const int ng = grid.Ng;
  const int count = s.last + 1;
  if (count > basis.dim()) throw std::invalid_argument("chern_number: band set exceeds basis dimension");
  FrameGrid out;
  out.frames.resize(static_cast<std::size_t>(ng) * ng);
  std::vector<double> gaps(out.frames.size());
  parallel_for(out.frames.size(), opt.threads, [&](std::size_t idx) {
    const int a = static_cast<int>(idx) / ng, b = static_cast<int>(idx) % ng;
    const auto es = eigh_lowest(build_h_eff(p, grid.point(a, b), basis), count);
    double gap = es.values(s.last) - es.values(s.last - 1);
    if (s.first > 1) gap = std::min(gap, es.values(s.first - 1) - es.values(s.first - 2));
    gaps[idx] = gap;
    out.frames[idx] = es.vectors.middleCols(s.first - 1, s.size());
  });
  if (opt.randomize_phases) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (auto& f : out.frames)
      for (Eigen::Index c = 0; c < f.cols(); ++c) f.col(c) *= std::polar(1.0, phase(rng));
  }
  out.min_gap = *std::min_element(gaps.begin(), gaps.end());
  return out;
}

// Normalized link variable det<u_i(k), u_j(k')>.
inline cplx link(const MatrixXc& from, const MatrixXc& to, double det_tol) {
  const MatrixXc overlap = (to.adjoint() * from).transpose();  // M_ij = Σ_m from_mi conj(to_mj)
  const cplx d = overlap.determinant();
  if (std::abs(d) < det_tol)
    throw NumericalError("singular_link", "link overlap nearly singular; refine the k-grid");
  return d / std::abs(d);
}

}  // namespace detail

inline ChernReport chern_number(const EffectiveParams& p, BandSet s, const KGrid& grid,
                                const PlaneWaveBasis& basis, const ChernOptions& opt = {}) {
  p.validate();
  s.validate();
  ChernReport rep;
  rep.band_set = s;
  const int ng = grid.Ng;
  const auto fg = detail::compute_frames(p, s, grid, basis, opt);
  rep.min_gap = fg.min_gap;
  if (!(fg.min_gap > opt.gap_tol)) {
    rep.valid = false;
    rep.reason = "gap_closure";
    return rep;
  }

  // Frame at integer grid coordinates (a, b), possibly one step past the edge.
  auto frame = [&](int a, int b) -> MatrixXc {
    const FreqVector wrap{a / ng, b / ng};
    const MatrixXc& f = fg.frames[static_cast<std::size_t>(a % ng) * ng + (b % ng)];
    if (wrap == FreqVector{}) return f;
    auto shifted = sewing_shift(f, wrap, basis);
    rep.max_sewing_loss = std::max(rep.max_sewing_loss, shifted.discarded_fraction);
    return std::move(shifted.vectors);
  };

  Eigen::MatrixXcd link1(ng, ng), link2(ng, ng);
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      const MatrixXc& here = fg.frames[static_cast<std::size_t>(a) * ng + b];
      link1(a, b) = detail::link(here, frame(a + 1, b), opt.det_tol);
      link2(a, b) = detail::link(here, frame(a, b + 1), opt.det_tol);
    }

  rep.plaquette_phases.resize(ng, ng);
  double total = 0.0;
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      const int a1 = (a + 1) % ng, b1 = (b + 1) % ng;
      const cplx loop = link1(a, b) * link2(a1, b) * std::conj(link1(a, b1)) * std::conj(link2(a, b));
      const double phase = std::arg(loop);
      rep.plaquette_phases(a, b) = phase;
      total += phase;
    }
  rep.chern_raw = total / (2.0 * std::numbers::pi);
  rep.chern = static_cast<int>(std::lround(rep.chern_raw));
  rep.valid = true;
  return rep;
}

struct CurvatureMap {
  KGrid grid{4};
  int band = 1;
  double theta = 0.5;
  // Per-area curvature on each plaquette (a, b), centred at ((a+½)/Ng, (b+½)/Ng).
  Eigen::MatrixXd curvature;
  ChernReport report;

  double integral() const { return curvature.sum() / (double(grid.Ng) * grid.Ng); }
};

inline CurvatureMap berry_curvature_map(const EffectiveParams& p, int band, const KGrid& grid,
                                        const PlaneWaveBasis& basis, const ChernOptions& opt = {}) {
  CurvatureMap map;
  map.grid = grid;
  map.band = band;
  map.theta = p.theta;
  map.report = chern_number(p, {band, band}, grid, basis, opt);
  if (!map.report.valid)
    throw NumericalError(map.report.reason, "berry_curvature_map: band " + std::to_string(band) +
                                                " is not isolated on the grid");
  map.curvature = map.report.plaquette_phases * (double(grid.Ng) * grid.Ng);
  return map;
}

// Fraction of Σ|curvature| carried by plaquettes whose centre lies within
// `distance` of a line k1 ∈ Z + offset or k2 ∈ Z + offset.
inline double curvature_mass_near_lines(const CurvatureMap& map, double offset, double distance) {
  const int ng = map.grid.Ng;
  auto dist = [&](double x) {
    const double y = x - offset;
    return std::abs(y - std::round(y));
  };
  double near = 0.0, total = 0.0;
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      const double w = std::abs(map.curvature(a, b));
      total += w;
      const double c1 = (a + 0.5) / ng, c2 = (b + 0.5) / ng;
      if (std::min(dist(c1), dist(c2)) <= distance) near += w;
    }
  return total > 0.0 ? near / total : 0.0;
}

// CSV "k1,k2,curvature", row-major over the grid (a outer, b inner), at
// plaquette centres.
inline void write_curvature_csv(const CurvatureMap& map, std::ostream& os) {
  char buf[128];
  os << "k1,k2,curvature\n";
  const int ng = map.grid.Ng;
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", (a + 0.5) / ng, (b + 0.5) / ng, map.curvature(a, b));
      os << buf;
    }
}

}  // namespace cavband
