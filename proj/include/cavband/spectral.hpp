#pragma once

// Dense Hermitian eigendecomposition (LAPACK zheevd / zheevr) and chained
// degeneracy clustering.

#include <algorithm>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "cavband/errors.hpp"

namespace cavband {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  MatrixXc vectors;        // columns are orthonormal eigenvectors (may be empty)
};

// max |H_ij - conj H_ji| / max |H_ij|  (0 for the zero matrix).
inline double hermiticity_defect(const MatrixXc& h) {
  const double scale = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace detail {

inline void require_hermitian(const MatrixXc& h) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw std::invalid_argument("eigh: matrix must be square and non-empty");
  if (hermiticity_defect(h) > 1e-12)
    throw std::invalid_argument("eigh: matrix is not Hermitian within 1e-12 (relative)");
}

inline lapack_complex_double* lapack_ptr(MatrixXc& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}

}  // namespace detail

// Full decomposition.
inline EigenSystem eigh(const MatrixXc& h, bool want_vectors = true) {
  detail::require_hermitian(h);
  const auto n = static_cast<lapack_int>(h.rows());
  MatrixXc a = h;
  EigenSystem out;
  out.values.resize(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n,
                                         detail::lapack_ptr(a), n, out.values.data());
  if (info > 0) throw NumericalError("non_convergence", "eigh: zheevd failed to converge");
  if (info < 0) throw std::logic_error("eigh: invalid argument to zheevd");
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

// Lowest `count` eigenpairs (values ascending).
inline EigenSystem eigh_lowest(const MatrixXc& h, int count, bool want_vectors = true) {
  detail::require_hermitian(h);
  const auto n = static_cast<lapack_int>(h.rows());
  if (count < 1 || count > n) throw std::invalid_argument("eigh_lowest: count out of range");
  MatrixXc a = h;
  EigenSystem out;
  Eigen::VectorXd w(n);
  MatrixXc z(want_vectors ? n : 1, want_vectors ? count : 1);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', 'U', n, detail::lapack_ptr(a), n, 0.0,
      0.0, 1, count, 0.0, &found, w.data(), detail::lapack_ptr(z), want_vectors ? n : 1,
      isuppz.data());
  if (info > 0 || found != count)
    throw NumericalError("non_convergence", "eigh_lowest: zheevr failed to converge");
  if (info < 0) throw std::logic_error("eigh_lowest: invalid argument to zheevr");
  out.values = w.head(count);
  if (want_vectors) out.vectors = std::move(z);
  return out;
}

inline Eigen::VectorXd eigvalsh_lowest(const MatrixXc& h, int count) {
  return eigh_lowest(h, count, false).values;
}

// Maximal runs of ascending `values` whose consecutive gaps are <= tol.
// Chained: (0, 0.4, 0.8) with tol 0.5 is a single group. Indices are 0-based.
inline std::vector<std::vector<int>> cluster_degeneracies(std::span<const double> values,
                                                          double tol) {
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && values[i] < values[i - 1])
      throw std::invalid_argument("cluster_degeneracies: values must be ascending");
    if (groups.empty() || values[i] - values[i - 1] > tol) groups.emplace_back();
    groups.back().push_back(static_cast<int>(i));
  }
  return groups;
}

inline std::vector<std::vector<int>> cluster_degeneracies(const Eigen::VectorXd& values,
                                                          double tol) {
  return cluster_degeneracies(std::span<const double>(values.data(), values.size()), tol);
}

}  // namespace cavband
