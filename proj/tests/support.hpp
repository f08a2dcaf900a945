#pragma once

// Hand-rolled generators for property tests. Every test seeds its own
// generator so failures reproduce.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/fourier_potential.hpp"

namespace testing_support {

using cavband::cplx;
using cavband::MatrixXc;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned long long seed) : rng(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }
  cplx complex_normal() { return {normal(), normal()}; }

  cavband::BlochMomentum momentum() { return {uniform(), uniform()}; }

  MatrixXc hermitian(int n) {
    MatrixXc a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = complex_normal();
    return 0.5 * (a + a.adjoint());
  }

  MatrixXc unitary(int n) {
    MatrixXc a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = complex_normal();
    return Eigen::HouseholderQR<MatrixXc>(a).householderQ() * MatrixXc::Identity(n, n);
  }

  // Real trigonometric polynomial with frequencies |n_i| <= reach.
  cavband::FourierPotential potential(int reach, double scale) {
    cavband::FourierPotential v;
    for (int n1 = -reach; n1 <= reach; ++n1)
      for (int n2 = -reach; n2 <= reach; ++n2) {
        const cavband::FreqVector n{n1, n2};
        if (n == cavband::FreqVector{} || -n < n) continue;
        v.set_pair(n, scale * complex_normal());
      }
    return v;
  }
};

inline double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_support
