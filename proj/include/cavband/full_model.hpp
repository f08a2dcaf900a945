#pragma once

// Conjugated full Hamiltonian
//   H̃_J(k) = |D - k|² + (J/2)(D_w² + w² - 1) + U_k* V U_k
// on plane waves ⊗ Hermite functions ψ_0..ψ_Nw, and the large-J comparison
// with the effective model.

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/errors.hpp"
#include "cavband/fourier_potential.hpp"
#include "cavband/parallel.hpp"
#include "cavband/spectral.hpp"

namespace cavband {

// Flattening is plane-wave major: index = pw_index * (Nw + 1) + a.
class ProductBasis {
 public:
  ProductBasis(PlaneWaveBasis pw, int Nw) : pw_(pw), nw_(Nw) {
    if (Nw < 0) throw std::invalid_argument("ProductBasis: Nw must be >= 0");
  }
  const PlaneWaveBasis& plane_waves() const noexcept { return pw_; }
  int hermite_cutoff() const noexcept { return nw_; }
  int hermite_dim() const noexcept { return nw_ + 1; }
  int dim() const noexcept { return pw_.dim() * hermite_dim(); }
  int index(int pw_index, int a) const noexcept { return pw_index * hermite_dim() + a; }

 private:
  PlaneWaveBasis pw_;
  int nw_;
};

struct FullParams {
  FourierPotential V;
  double B = 0.0;
  double J = 1.0;

  double lambda() const { return std::sqrt(0.5 * B); }
  void validate() const {
    if (!(B >= 0.0)) throw std::invalid_argument("FullParams: B must be >= 0");
    if (!(J > 0.0)) throw std::invalid_argument("FullParams: J must be > 0");
  }
};

struct DisplacementOptions {
  int pad = 20;
  int max_pad = 400;
  int pad_step = 20;
  double converge_tol = 1e-12;  // entrywise change when the pad grows
  double check_tol = 1e-9;      // (0,0) element against the closed form
};

namespace detail {

// w and D_w on ψ_0..ψ_{n-1}: w = (a + a†)/√2, D_w = i(a† - a)/√2.
inline MatrixXc position_matrix(int n) {
  MatrixXc x = MatrixXc::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) x(j + 1, j) = x(j, j + 1) = std::sqrt(0.5 * (j + 1));
  return x;
}

inline MatrixXc momentum_matrix(int n) {
  MatrixXc p = MatrixXc::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    p(j + 1, j) = cplx(0.0, std::sqrt(0.5 * (j + 1)));
    p(j, j + 1) = cplx(0.0, -std::sqrt(0.5 * (j + 1)));
  }
  return p;
}

inline MatrixXc displacement_on(int n, double s1, double s2, double B) {
  const double a = std::sqrt(B);
  const MatrixXc g1 = cplx(0.0, -s1 * a) * position_matrix(n);
  const MatrixXc g2 = cplx(0.0, -s2 * a) * momentum_matrix(n);
  const MatrixXc e1 = g1.exp();
  const MatrixXc e2 = g2.exp();
  return e1 * e2;
}

}  // namespace detail

// <ψ_0, e^{-i s1 √B w} e^{-i s2 √B D_w} ψ_0> = exp(-B|s|²/4) exp(-iB s1 s2 / 2).
inline cplx displacement_vacuum_element(double s1, double s2, double B) {
  return std::exp(-0.25 * B * (s1 * s1 + s2 * s2)) * std::polar(1.0, -0.5 * B * s1 * s2);
}

// Matrix of e^{-i s1 √B w} e^{-i s2 √B D_w} on ψ_0..ψ_Nw. Each factor is
// exponentiated on an enlarged Hermite space and the product cropped; the
// pad grows until the cropped block is stable and the vacuum element
// matches its closed form.
inline MatrixXc displacement_matrix(double s1, double s2, double B, int Nw, const DisplacementOptions& opt = {}) {
  if (Nw < 0) throw std::invalid_argument("displacement_matrix: Nw must be >= 0");
  if (!(B >= 0.0)) throw std::invalid_argument("displacement_matrix: B must be >= 0");
  const int keep = Nw + 1;
  if (s1 == 0.0 && s2 == 0.0) return MatrixXc::Identity(keep, keep);
  MatrixXc prev = detail::displacement_on(keep + opt.pad, s1, s2, B).topLeftCorner(keep, keep);
  for (int pad = opt.pad + opt.pad_step; pad <= opt.max_pad; pad += opt.pad_step) {
    MatrixXc cur = detail::displacement_on(keep + pad, s1, s2, B).topLeftCorner(keep, keep);
    const double change = (cur - prev).cwiseAbs().maxCoeff();
    prev = std::move(cur);
    if (change <= opt.converge_tol) {
      if (std::abs(prev(0, 0) - displacement_vacuum_element(s1, s2, B)) > opt.check_tol)
        break;
      return prev;
    }
  }
  throw NumericalError("displacement_truncation",
                       "displacement_matrix: Hermite pad exhausted before convergence");
}

inline MatrixXc displacement_matrix(FreqVector n, double B, int Nw, const DisplacementOptions& opt = {}) {
  return displacement_matrix(double(n.n1), double(n.n2), B, Nw, opt);
}

// Read-mostly cache of displacement matrices keyed by (n, B, Nw).
class DisplacementCache {
 public:
  const MatrixXc& get(FreqVector n, double B, int Nw) {
    const Key key{n.n1, n.n2, B, Nw};
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    MatrixXc m = displacement_matrix(n, B, Nw);
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(key, std::move(m)).first->second;
  }

 private:
  using Key = std::tuple<int, int, double, int>;
  std::shared_mutex mutex_;
  std::map<Key, MatrixXc> cache_;
};

// Blocks: |m - k|² + J a on the diagonal; the potential couples m -> m + n
// with x-phase V̂(n) exp(iB n1 (m2 + n2 - k2)) tensored with the
// displacement matrix of n.
inline MatrixXc build_h_full(const FullParams& p, BlochMomentum k, const ProductBasis& basis,
                             DisplacementCache* cache = nullptr, int max_dim = 8000) {
  p.validate();
  if (basis.dim() > max_dim)
    throw std::invalid_argument("build_h_full: dimension " + std::to_string(basis.dim()) +
                                " exceeds cap " + std::to_string(max_dim));
  const auto& pw = basis.plane_waves();
  const int nh = basis.hermite_dim();
  DisplacementCache local;
  DisplacementCache& dc = cache ? *cache : local;

  MatrixXc h = MatrixXc::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < pw.dim(); ++i) {
    const FreqVector m = pw.mode(i);
    const double kin = (m.n1 - k.k1) * (m.n1 - k.k1) + (m.n2 - k.k2) * (m.n2 - k.k2);
    for (int a = 0; a < nh; ++a) h(basis.index(i, a), basis.index(i, a)) = kin + p.J * a;
    for (const auto& [n, c] : p.V.coeffs()) {
      const auto j = pw.index(m + n);
      if (!j) continue;
      const cplx x_phase = c * std::polar(1.0, p.B * n.n1 * (m.n2 + n.n2 - k.k2));
      h.block(basis.index(*j, 0), basis.index(i, 0), nh, nh) += x_phase * dc.get(n, p.B, basis.hermite_cutoff());
    }
  }
  return h;
}

struct JStudyRow {
  double J = 0.0;
  int band = 1;
  double E_full = 0.0;
  double E_eff = 0.0;
  double abs_diff = 0.0;
};

struct JStudyFit {
  int band = 1;
  double slope = 0.0;      // d log|E_full - E_eff| / d log J
  double intercept = 0.0;
  bool below_noise = false;  // some difference under 1e-12: no fit
};

struct JStudyResult {
  std::vector<JStudyRow> rows;
  std::vector<JStudyFit> fits;
};

// Least-squares slope of log|E_j(k,B,J) - E_j(k,B)| against log J.
inline JStudyResult j_convergence_study(const FourierPotential& V, double B, BlochMomentum k,
                                        const std::vector<int>& bands_wanted, const std::vector<double>& J_values,
                                        const PlaneWaveBasis& pw, int Nw, unsigned threads = 0) {
  if (bands_wanted.empty()) throw std::invalid_argument("j_convergence_study: no bands requested");
  if (J_values.size() < 2) throw std::invalid_argument("j_convergence_study: need at least two J values");
  int top = 0;
  for (int b : bands_wanted) {
    if (b < 1) throw std::invalid_argument("j_convergence_study: band indices are 1-based");
    top = std::max(top, b);
  }
  const EffectiveParams eff{heat_smooth(V, B), B, 0.0};
  const Eigen::VectorXd e_eff = bands(eff, k, pw, top);

  const ProductBasis basis(pw, Nw);
  DisplacementCache cache;
  for (const auto& [n, c] : V.coeffs()) cache.get(n, B, Nw);
  std::vector<Eigen::VectorXd> e_full(J_values.size());
  parallel_for(J_values.size(), threads, [&](std::size_t i) {
    e_full[i] = eigvalsh_lowest(build_h_full({V, B, J_values[i]}, k, basis, &cache), top);
  });

  JStudyResult out;
  for (std::size_t i = 0; i < J_values.size(); ++i)
    for (int b : bands_wanted) {
      const double ef = e_full[i](b - 1), ee = e_eff(b - 1);
      out.rows.push_back({J_values[i], b, ef, ee, std::abs(ef - ee)});
    }
  for (int b : bands_wanted) {
    JStudyFit fit{b};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : out.rows) {
      if (r.band != b) continue;
      if (r.abs_diff < 1e-12) fit.below_noise = true;
      const double x = std::log(r.J), y = std::log(std::max(r.abs_diff, 1e-300));
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    if (fit.below_noise) {
      fit.slope = fit.intercept = std::nan("");
    } else {
      fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      fit.intercept = (sy - fit.slope * sx) / n;
    }
    out.fits.push_back(fit);
  }
  return out;
}

}  // namespace cavband
