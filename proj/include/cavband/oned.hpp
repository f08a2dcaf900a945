#pragma once

// 1D Hill problem (D_t - κ)² + γ cos t on [0, 2π) and the separable
// structure of the effective bands at B = 2πℓ:
//   Spec H(k) = { ε_m(k1) + ε_n(k2) : m, n >= 1 }.
// Band pairs (m, n) below are 1-based, matching E_{m,n} = ε_m(k1) + ε_n(k2).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/spectral.hpp"

namespace cavband {

struct HillParams {
  double gamma = 0.0;
  double kappa = 0.0;
  int N1 = 8;  // Fourier modes j = -N1..N1
};

struct OneDBand {
  Eigen::VectorXd values;
  MatrixXc vectors;  // unit ℓ²-norm coefficient vectors, index j + N1
};

// diag((j - κ)²) with γ/2 on both neighbouring off-diagonals.
inline MatrixXc hill_matrix(const HillParams& p) {
  if (p.N1 < 1) throw std::invalid_argument("hill_matrix: N1 must be >= 1");
  const int dim = 2 * p.N1 + 1;
  MatrixXc h = MatrixXc::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double q = (i - p.N1) - p.kappa;
    h(i, i) = q * q;
    if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = 0.5 * p.gamma;
  }
  return h;
}

inline OneDBand one_d_bands(const HillParams& p, int count, bool want_vectors = true) {
  if (count < 1 || count > 2 * p.N1 + 1) throw std::invalid_argument("one_d_bands: count out of range");
  auto es = eigh_lowest(hill_matrix(p), count, want_vectors);
  return {std::move(es.values), std::move(es.vectors)};
}

// σ_j = 0 for odd j, 1/2 for even j.
inline double free_sigma(int j) { return j % 2 ? 0.0 : 0.5; }

// Free 1D gap d_j(κ) = ε⁰_{j+1}(κ) - ε⁰_j(κ) for κ in [0, 1/2]:
//   d_{2a-1} = (2a - 1)(1 - 2κ),   d_{2a} = 4aκ.
inline double free_gap(int j, double kappa) {
  if (j < 1) throw std::invalid_argument("free_gap: j must be >= 1");
  if (!(kappa >= 0.0 && kappa <= 0.5)) throw std::invalid_argument("free_gap: kappa must lie in [0, 1/2]");
  if (j % 2) return j * (1.0 - 2.0 * kappa);
  return 2.0 * j * kappa;
}

// Free 1D band ε⁰_j(κ) for κ in [0, 1/2]: (a-1+κ)² for j = 2a-1, (a-κ)² for j = 2a.
inline double free_band(int j, double kappa) {
  if (j < 1) throw std::invalid_argument("free_band: j must be >= 1");
  const int a = (j + 1) / 2;
  return j % 2 ? (a - 1 + kappa) * (a - 1 + kappa) : (a - kappa) * (a - kappa);
}

// First `count` of the sorted sums ε_m(k1) + ε_n(k2).
inline Eigen::VectorXd two_d_from_one_d(double gamma, BlochMomentum k, int count, int N1) {
  const int d = 2 * N1 + 1;
  if (count < 1 || count > d * d) throw std::invalid_argument("two_d_from_one_d: count out of range");
  const auto e1 = one_d_bands({gamma, k.k1, N1}, d, false).values;
  const auto e2 = one_d_bands({gamma, k.k2, N1}, d, false).values;
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) sums.push_back(e1(a) + e2(b));
  std::partial_sort(sums.begin(), sums.begin() + count, sums.end());
  return Eigen::Map<Eigen::VectorXd>(sums.data(), count);
}

struct BandPair {
  int m = 1;
  int n = 1;
  bool operator==(const BandPair&) const = default;
};

// E_{m,n}(k) = ε_m(k1) + ε_n(k2).
inline double product_band(BandPair b, double gamma, BlochMomentum k, int N1) {
  const int need = std::max(b.m, b.n);
  if (b.m < 1 || b.n < 1 || need > 2 * N1 + 1) throw std::invalid_argument("product_band: index out of range");
  const auto e1 = one_d_bands({gamma, k.k1, N1}, b.m, false).values;
  const auto e2 = one_d_bands({gamma, k.k2, N1}, b.n, false).values;
  return e1(b.m - 1) + e2(b.n - 1);
}

struct KPath {
  BlochMomentum start;
  BlochMomentum end;
  BlochMomentum at(double t) const {
    return {start.k1 + t * (end.k1 - start.k1), start.k2 + t * (end.k2 - start.k2)};
  }
};

struct Crossing {
  bool found = false;
  double t = 0.0;       // path parameter in [0, 1]
  BlochMomentum k{};
  double residual = 0.0;    // |E_a - E_b| at k
  double diff_start = 0.0;  // E_a - E_b at t = 0
  double diff_end = 0.0;    // E_a - E_b at t = 1
};

// Bisection on t ↦ E_a(path(t)) - E_b(path(t)). Band energies are tracked by
// sorted index, so the difference is continuous. No sign change means no
// crossing is reported (found = false).
inline Crossing crossing_locate(BandPair a, BandPair b, double gamma, const KPath& path, int N1,
                                double tol = 1e-9) {
  auto diff = [&](double t) {
    const auto k = path.at(t);
    return product_band(a, gamma, k, N1) - product_band(b, gamma, k, N1);
  };
  Crossing c;
  c.diff_start = diff(0.0);
  c.diff_end = diff(1.0);
  double lo = 0.0, hi = 1.0, flo = c.diff_start;
  auto finish = [&](double t, double f) {
    c.found = true;
    c.t = t;
    c.k = path.at(t);
    c.residual = std::abs(f);
    return c;
  };
  if (std::abs(c.diff_start) <= tol) return finish(0.0, c.diff_start);
  if (std::abs(c.diff_end) <= tol) return finish(1.0, c.diff_end);
  if ((c.diff_start > 0) == (c.diff_end > 0)) return c;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = diff(mid);
    if (std::abs(fm) <= tol || hi - lo < 1e-16) return finish(mid, fm);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  return finish(mid, diff(mid));
}

struct CrossingCertificate {
  BandPair a;
  BandPair b;
  KPath path;
  Crossing crossing;
};

// (m, n) ~ (m-1, n+1): straight path from (σ_{m-1}, 1/2 - σ_n) to (1/2 - σ_{m-1}, σ_n),
// where the free difference equals m - 1 and -n respectively.
inline KPath same_sum_path(BandPair a) {
  const double s = free_sigma(a.m - 1), t = free_sigma(a.n);
  return {{s, 0.5 - t}, {0.5 - s, t}};
}

// (1, r-1) ~ (3, r-2) and more generally (H, N) ~ (H+2, N-1): along k1 = 0,
// k2 from σ_{N-1} to 1/2 - σ_{N-1}.
inline KPath raise_path(BandPair a) {
  const double s = free_sigma(a.n - 1);
  return {{0.0, s}, {0.0, 0.5 - s}};
}

inline CrossingCertificate certify_same_sum(BandPair a, double gamma, int N1) {
  if (a.m < 2) throw std::invalid_argument("certify_same_sum: m must be >= 2");
  const BandPair b{a.m - 1, a.n + 1};
  const KPath path = same_sum_path(a);
  return {a, b, path, crossing_locate(a, b, gamma, path, N1)};
}

inline CrossingCertificate certify_raise(BandPair a, double gamma, int N1) {
  if (a.n < 2) throw std::invalid_argument("certify_raise: n must be >= 2");
  const BandPair b{a.m + 2, a.n - 1};
  const KPath path = raise_path(a);
  return {a, b, path, crossing_locate(a, b, gamma, path, N1)};
}

// Finite checklist of the intersection relations behind the band-overlap
// chains: (m, n) ~ (m-1, n+1) for every m >= 2 with m + n <= max_sum, and
// (1, r-1) ~ (3, r-2) for 4 <= r <= max_sum.
inline std::vector<CrossingCertificate> overlap_chain_inventory(double gamma, int max_sum, int N1) {
  std::vector<CrossingCertificate> out;
  for (int r = 3; r <= max_sum; ++r)
    for (int m = 2; m < r; ++m) out.push_back(certify_same_sum({m, r - m}, gamma, N1));
  for (int r = 4; r <= max_sum; ++r) out.push_back(certify_raise({1, r - 1}, gamma, N1));
  return out;
}

}  // namespace cavband
