#pragma once

// Real 2π-periodic potentials on the square lattice, stored by their
// Fourier coefficients:  V(x) = Σ_n V̂(n) exp(i(n1 x1 + n2 x2)).

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace cavband {

using cplx = std::complex<double>;

struct FreqVector {
  int n1 = 0;
  int n2 = 0;

  constexpr FreqVector operator-() const { return {-n1, -n2}; }
  constexpr FreqVector operator+(FreqVector o) const { return {n1 + o.n1, n2 + o.n2}; }
  constexpr FreqVector operator-(FreqVector o) const { return {n1 - o.n1, n2 - o.n2}; }
  constexpr int norm2() const { return n1 * n1 + n2 * n2; }
  constexpr int max_abs() const { return std::max(std::abs(n1), std::abs(n2)); }

  constexpr auto operator<=>(const FreqVector&) const = default;
};

class FourierPotential {
 public:
  using Coefficients = std::map<FreqVector, cplx>;

  FourierPotential() = default;

  // Validates Hermitian symmetry V̂(-n) = conj V̂(n) to `tol` (relative to
  // the largest coefficient). Exact zeros are dropped.
  static FourierPotential from_coefficients(const Coefficients& coeffs, double tol = 1e-12) {
    double scale = 0.0;
    for (const auto& [n, c] : coeffs) scale = std::max(scale, std::abs(c));
    FourierPotential v;
    for (const auto& [n, c] : coeffs) {
      auto it = coeffs.find(-n);
      const cplx partner = it == coeffs.end() ? cplx{} : it->second;
      if (std::abs(partner - std::conj(c)) > tol * std::max(scale, 1.0))
        throw std::invalid_argument("Fourier coefficients violate Hermitian symmetry at n=(" +
                                    std::to_string(n.n1) + "," + std::to_string(n.n2) + ")");
      if (c != cplx{}) v.coeffs_[n] = c;
    }
    return v;
  }

  // Stores c at n and conj(c) at -n. For n = 0 the coefficient must be real.
  void set_pair(FreqVector n, cplx c) {
    if (n == FreqVector{} && c.imag() != 0.0)
      throw std::invalid_argument("zero-frequency coefficient of a real potential must be real");
    if (c == cplx{}) {
      coeffs_.erase(n);
      coeffs_.erase(-n);
      return;
    }
    coeffs_[n] = c;
    coeffs_[-n] = std::conj(c);
  }

  cplx coeff(FreqVector n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? cplx{} : it->second;
  }

  const Coefficients& coeffs() const noexcept { return coeffs_; }
  bool empty() const noexcept { return coeffs_.empty(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  // Largest |n_i| over stored frequencies (0 for the zero potential).
  int max_freq() const {
    int m = 0;
    for (const auto& [n, c] : coeffs_) m = std::max(m, n.max_abs());
    return m;
  }

  double hermitian_defect() const {
    double d = 0.0;
    for (const auto& [n, c] : coeffs_) d = std::max(d, std::abs(coeff(-n) - std::conj(c)));
    return d;
  }

 private:
  Coefficients coeffs_;
};

// V(x) = V0 (cos x1 + cos x2).
inline FourierPotential standard_potential(double V0) {
  FourierPotential v;
  if (V0 == 0.0) return v;
  v.set_pair({1, 0}, 0.5 * V0);
  v.set_pair({0, 1}, 0.5 * V0);
  return v;
}

// Heat smoothing W = exp(BΔ/4) V, i.e. Ŵ(n) = V̂(n) exp(-B|n|²/4).
inline FourierPotential heat_smooth(const FourierPotential& v, double B) {
  if (!(B >= 0.0)) throw std::invalid_argument("heat_smooth: B must be >= 0");
  FourierPotential::Coefficients out;
  for (const auto& [n, c] : v.coeffs()) out[n] = c * std::exp(-0.25 * B * n.norm2());
  return FourierPotential::from_coefficients(out);
}

// Pointwise value; the imaginary part cancels by Hermitian symmetry.
inline double evaluate(const FourierPotential& v, double x1, double x2) {
  cplx s{};
  for (const auto& [n, c] : v.coeffs()) s += c * std::polar(1.0, n.n1 * x1 + n.n2 * x2);
  if (std::abs(s.imag()) > 1e-12 * std::max(1.0, std::abs(s.real())))
    throw std::logic_error("evaluate: non-real value, potential is not Hermitian-symmetric");
  return s.real();
}

// JSON form: [{"n1":..,"n2":..,"re":..,"im":..}, ...]. On input only one
// member of each ±n pair is required; the partner is synthesized. If both
// are present they must agree.
inline nlohmann::json to_json(const FourierPotential& v) {
  auto arr = nlohmann::json::array();
  for (const auto& [n, c] : v.coeffs())
    arr.push_back({{"n1", n.n1}, {"n2", n.n2}, {"re", c.real()}, {"im", c.imag()}});
  return arr;
}

inline FourierPotential potential_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("potential JSON must be an array of records");
  FourierPotential::Coefficients given;
  for (const auto& rec : j) {
    for (const auto& [key, val] : rec.items())
      if (key != "n1" && key != "n2" && key != "re" && key != "im")
        throw std::invalid_argument("unknown key in potential record: " + key);
    const FreqVector n{rec.at("n1").get<int>(), rec.at("n2").get<int>()};
    const cplx c{rec.value("re", 0.0), rec.value("im", 0.0)};
    if (given.contains(n)) throw std::invalid_argument("duplicate potential frequency");
    given[n] = c;
  }
  FourierPotential::Coefficients full = given;
  for (const auto& [n, c] : given)
    if (!given.contains(-n)) full[-n] = std::conj(c);
  return FourierPotential::from_coefficients(full);
}

}  // namespace cavband
