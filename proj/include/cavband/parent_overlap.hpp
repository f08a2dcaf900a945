#pragma once

// Overlap of the parent states
//   Φ0(k)(x, w) = (2π)^{-1} exp(-i√B k1 w + iB k1 k2 / 2) ψ0(w - √B k2),
// compared against
//   <Φ0(k), Φ0(k')> = exp(-B(|k - k'|² - 2iσ(k, k'))/4),  σ(k, k') = k1' k2 - k1 k2'.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cavband/effective_hamiltonian.hpp"
#include "cavband/full_model.hpp"

namespace cavband {

struct ParentOverlap {
  cplx numeric;
  cplx closed_form;
  double deviation = 0.0;
  bool within_tolerance = false;
};

inline cplx parent_overlap_closed_form(double B, BlochMomentum k, BlochMomentum kp) {
  const double d1 = k.k1 - kp.k1, d2 = k.k2 - kp.k2;
  const double sigma = kp.k1 * k.k2 - k.k1 * kp.k2;
  return std::exp(-0.25 * B * (d1 * d1 + d2 * d2)) * std::polar(1.0, 0.5 * B * sigma);
}

// The w-part of Φ0(k) is exp(iB k1 k2 / 2) times column 0 of the displacement
// matrix at the real shift s = k; the x-part integrates to 1.
inline ParentOverlap parent_overlap_check(double B, BlochMomentum k, BlochMomentum kp, int Nw,
                                          double tol = 1e-8) {
  if (Nw < 40) throw std::invalid_argument("parent_overlap_check: Nw must be >= 40");
  const VectorXc phi = std::polar(1.0, 0.5 * B * k.k1 * k.k2) * displacement_matrix(k.k1, k.k2, B, Nw).col(0);
  const VectorXc phip = std::polar(1.0, 0.5 * B * kp.k1 * kp.k2) * displacement_matrix(kp.k1, kp.k2, B, Nw).col(0);
  ParentOverlap out;
  out.numeric = phip.dot(phi);  // Σ φ conj(φ')
  out.closed_form = parent_overlap_closed_form(B, k, kp);
  out.deviation = std::abs(out.numeric - out.closed_form);
  out.within_tolerance = out.deviation <= tol;
  return out;
}

}  // namespace cavband
