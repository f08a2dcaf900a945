#pragma once

// Bloch fiber of the effective Hamiltonian
//   H(k) = |D - k|² + W^w(x1 + B(D_{x2} - k2), x2)
// in the plane-wave basis e_m(x) = (2π)^{-1} exp(i<m,x>), |m_i| <= N.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "cavband/fourier_potential.hpp"
#include "cavband/spectral.hpp"

namespace cavband {

struct BlochMomentum {
  double k1 = 0.0;
  double k2 = 0.0;

  BlochMomentum operator+(BlochMomentum o) const { return {k1 + o.k1, k2 + o.k2}; }
  // Representative in [0,1)².
  BlochMomentum reduced() const { return {k1 - std::floor(k1), k2 - std::floor(k2)}; }
};

// Square truncation |m1|,|m2| <= N, ordered lexicographically by (m1, m2):
// index = (m1 + N)(2N + 1) + (m2 + N).
class PlaneWaveBasis {
 public:
  explicit PlaneWaveBasis(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 0) throw std::invalid_argument("PlaneWaveBasis: cutoff must be >= 0");
  }

  int cutoff() const noexcept { return cutoff_; }
  int side() const noexcept { return 2 * cutoff_ + 1; }
  int dim() const noexcept { return side() * side(); }

  bool contains(FreqVector m) const noexcept { return m.max_abs() <= cutoff_; }

  FreqVector mode(int index) const { return {index / side() - cutoff_, index % side() - cutoff_}; }

  std::optional<int> index(FreqVector m) const {
    if (!contains(m)) return std::nullopt;
    return (m.n1 + cutoff_) * side() + (m.n2 + cutoff_);
  }

  std::optional<int> shift_index(int index, FreqVector p) const { return this->index(mode(index) + p); }

 private:
  int cutoff_;
};

struct EffectiveParams {
  FourierPotential W;  // already heat-smoothed
  double B = 0.0;
  double theta = 0.0;  // gauge: 0 Landau-type, 1/2 symmetric

  void validate() const {
    if (!(B >= 0.0)) throw std::invalid_argument("EffectiveParams: B must be >= 0");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("EffectiveParams: theta must lie in [0,1]");
  }

  // Effective problem for V = V0 (cos x1 + cos x2).
  static EffectiveParams from_v0(double V0, double B, double theta = 0.0) {
    return {heat_smooth(standard_potential(V0), B), B, theta};
  }
  // Same, parametrized by the smoothed coupling gamma = V0 exp(-B/4).
  static EffectiveParams from_gamma(double gamma, double B, double theta = 0.0) {
    return {standard_potential(gamma), B, theta};
  }
};

// Matrix entries (theta = 0):
//   diagonal          |m - k|²
//   (m + n, m)   +=   Ŵ(n) exp(-iB n1 n2 / 2) exp(iB n1 (m2 + n2 - k2))
// Couplings that leave the truncation are dropped. For theta != 0 the matrix
// is conjugated by diag exp(-i theta B (m1 - k1)(m2 - k2)).
inline MatrixXc build_h_eff(const EffectiveParams& p, BlochMomentum k, const PlaneWaveBasis& basis) {
  p.validate();
  const int dim = basis.dim();
  MatrixXc h = MatrixXc::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const FreqVector m = basis.mode(i);
    const double q1 = m.n1 - k.k1, q2 = m.n2 - k.k2;
    h(i, i) = q1 * q1 + q2 * q2;
    for (const auto& [n, c] : p.W.coeffs()) {
      const auto j = basis.index(m + n);
      if (!j) continue;
      const double phase = -0.5 * p.B * n.n1 * n.n2 + p.B * n.n1 * (m.n2 + n.n2 - k.k2);
      h(*j, i) += c * std::polar(1.0, phase);
    }
  }
  if (p.theta != 0.0) {
    VectorXc g(dim);
    for (int i = 0; i < dim; ++i) {
      const FreqVector m = basis.mode(i);
      g(i) = std::polar(1.0, -p.theta * p.B * (m.n1 - k.k1) * (m.n2 - k.k2));
    }
    h = g.asDiagonal() * h * g.conjugate().asDiagonal();
  }
  return h;
}

// E_1(k) <= ... <= E_count(k).
inline Eigen::VectorXd bands(const EffectiveParams& p, BlochMomentum k, const PlaneWaveBasis& basis, int count) {
  if (count < 1 || count > basis.dim()) throw std::invalid_argument("bands: count must lie in [1, basis.dim()]");
  return eigvalsh_lowest(build_h_eff(p, k, basis), count);
}

struct ShiftedVectors {
  MatrixXc vectors;
  double discarded_fraction = 0.0;  // largest over columns of |dropped|² / |v|²
};

// Multiplication by exp(i<x,p>): coefficient at m moves to m + p.
// Coefficients pushed out of the truncation are dropped.
inline ShiftedVectors sewing_shift(const MatrixXc& v, FreqVector p, const PlaneWaveBasis& basis) {
  if (v.rows() != basis.dim()) throw std::invalid_argument("sewing_shift: vector length does not match basis");
  ShiftedVectors out{MatrixXc::Zero(v.rows(), v.cols()), 0.0};
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    double dropped = 0.0;
    for (int i = 0; i < basis.dim(); ++i) {
      if (const auto j = basis.shift_index(i, p))
        out.vectors(*j, c) = v(i, c);
      else
        dropped += std::norm(v(i, c));
    }
    const double total = v.col(c).squaredNorm();
    if (total > 0.0) out.discarded_fraction = std::max(out.discarded_fraction, dropped / total);
  }
  return out;
}

}  // namespace cavband
