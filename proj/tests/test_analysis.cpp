#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cavband/analysis.hpp"
#include "support.hpp"

using namespace cavband;

namespace {

constexpr double kPi = std::numbers::pi;

GapScanOptions serial() {
  GapScanOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(PerturbativeGap, Examples) {
  EXPECT_NEAR(perturbative_gap(1.0, 2 * kPi), std::exp(-kPi / 2), 1e-15);
  EXPECT_NEAR(perturbative_gap(1.0, 2 * kPi), 0.20788, 1e-5);
  EXPECT_NEAR(perturbative_gap(1.0, 4 * kPi), 0.04322, 1e-5);
  for (int ell = 0; ell < 4; ++ell) EXPECT_NEAR(perturbative_gap(0.7, (2 * ell + 1) * kPi), 0.0, 1e-15);
  EXPECT_EQ(perturbative_gap(-1.0, 2 * kPi), perturbative_gap(1.0, 2 * kPi));
}

TEST(GapScan, Examples) {
  const PlaneWaveBasis b(6);
  const auto scan = gap_scan(0.1, {2 * kPi, 3 * kPi}, b, serial());
  const double gamma = 0.1 * std::exp(-kPi / 2);
  EXPECT_LE(std::abs(scan.g_numeric[0] - scan.g_perturbative[0]), 5 * gamma * gamma);
  EXPECT_LE(scan.g_numeric[1], 1e-8);
  EXPECT_LE(gap_scan(0.0, {2 * kPi}, b, serial()).g_numeric[0], 1e-12);
}

TEST(GapScan, MinimizerAtCorner) {
  const PlaneWaveBasis b(5);
  auto opt = serial();
  const double cell = 1.0 / opt.coarse / std::pow(opt.shrink, opt.refine_rounds - 1) / opt.stencil;
  // Not B = 2 pi: there the bands factorize and the gap is minimal on the whole line k1 = 1/2.
  for (double B : {5.0, 7.0, 9.0}) {
    const auto [g, k] = minimize_gap(EffectiveParams::from_gamma(0.01, B), b, opt);
    EXPECT_LE(std::abs(k.k1 - 0.5), cell) << B;
    EXPECT_LE(std::abs(k.k2 - 0.5), cell) << B;
  }
}

TEST(GapScan, ContinuousInB) {
  const PlaneWaveBasis b(5);
  std::vector<double> Bs;
  for (int i = 0; i < 16; ++i) Bs.push_back(kPi + i * 0.25);
  const auto g = gap_scan(0.1, Bs, b, serial()).g_numeric;
  for (std::size_t i = 1; i + 2 < g.size(); ++i) {
    const double local = std::max(std::abs(g[i] - g[i - 1]), std::abs(g[i + 2] - g[i + 1]));
    EXPECT_LE(std::abs(g[i + 1] - g[i]), 10 * local + 1e-12) << Bs[i];
  }
}

// e^{B/4} g(B) / V0 repeats when B/4 advances by pi, up to O(gamma).
TEST(GapScan, RescaledGapIsPeriodic) {
  const PlaneWaveBasis b(5);
  const double V0 = 0.1;
  for (double B : {4.0, 5.5, 7.0}) {
    const auto s = gap_scan(V0, {B, B + 4 * kPi}, b, serial());
    const double r0 = std::exp(B / 4) * s.g_numeric[0] / V0;
    const double r1 = std::exp((B + 4 * kPi) / 4) * s.g_numeric[1] / V0;
    EXPECT_LE(std::abs(r0 - r1), 5 * V0 * std::exp(-B / 4)) << B;
  }
}

TEST(Symmetry, OperatorIdentities) {
  const PlaneWaveBasis b(4);
  const auto s = symmetry_matrices(b);
  VectorXc e00 = VectorXc::Zero(b.dim());
  e00(*b.index({0, 0})) = 1.0;
  EXPECT_EQ((s.S0 * s.S0 * e00 - e00).norm(), 0.0);
  const auto rep = symmetry_check(EffectiveParams::from_gamma(0.1, 3 * kPi), b);
  EXPECT_LE(rep.s0_square_defect, 1e-12);
  EXPECT_LE(rep.s1_square_defect, 1e-12);
  EXPECT_LE(rep.anticommutator, 1e-12);
}

TEST(Symmetry, EvenDegeneracyAtCorner) {
  const PlaneWaveBasis b(6);
  for (int ell : {0, 1, 2})
    for (double gamma : {0.01, 0.1, 0.2}) {
      const auto rep = symmetry_check(EffectiveParams::from_gamma(gamma, (2 * ell + 1) * kPi), b);
      EXPECT_LE(rep.commutator0, 1e-10);
      EXPECT_LE(rep.commutator1, 1e-10);
      EXPECT_LE(rep.max_pair_spread, 1e-9) << ell << " " << gamma;
      for (const auto& c : rep.clusters) EXPECT_EQ(c.size() % 2, 0u) << ell << " " << gamma;
    }
}

TEST(Symmetry, NoPairingAwayFromOddMultiples) {
  const auto rep = symmetry_check(EffectiveParams::from_gamma(0.1, 2 * kPi), PlaneWaveBasis(5));
  EXPECT_GT(rep.max_pair_spread, 1e-3);
}

TEST(Dirac, SlopesAtSmallCoupling) {
  const PlaneWaveBasis b(6);
  const double gamma = 0.01, B0 = 3 * kPi;
  const auto fit = dirac_fit(gamma * std::exp(B0 / 4), 1, {1, 2}, default_cone_radii(gamma), default_cone_directions(), b);
  const double target = std::numbers::sqrt2 / 2;
  ASSERT_EQ(fit.directional_slopes.size(), 4u);
  EXPECT_NEAR(fit.directional_slopes[0].second, target, 1e-3 * target);
  EXPECT_FALSE(fit.nonlinear_warning);
  EXPECT_GE(fit.directional_slopes[1].second, 0.9 * target);
  for (const auto& [d, s] : fit.directional_slopes) EXPECT_GE(s, 0.0);
  EXPECT_EQ(fit.quadratic_form(0, 1), fit.quadratic_form(1, 0));
  EXPECT_NEAR(fit.E0, 0.5 - gamma / std::numbers::sqrt2, 5 * gamma * gamma);
}

TEST(Dirac, FormPositiveDefinite) {
  const PlaneWaveBasis b(6);
  for (double gamma : {0.01, 0.1}) {
    const auto fit =
        dirac_fit(gamma * std::exp(3 * kPi / 4), 1, {1, 2}, default_cone_radii(gamma), default_cone_directions(), b);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(fit.quadratic_form);
    EXPECT_GT(es.eigenvalues()(0), 0.0) << gamma;
  }
}

TEST(Dirac, Errors) {
  const PlaneWaveBasis b(5);
  const double V0 = 0.05 * std::exp(3 * kPi / 4);
  EXPECT_THROW(dirac_fit(V0, 1, {2, 3}, default_cone_radii(0.05), default_cone_directions(), b), NumericalError);
  EXPECT_THROW(dirac_fit(V0, 1, {1, 3}, default_cone_radii(0.05), default_cone_directions(), b), std::invalid_argument);
  EXPECT_THROW(dirac_fit(V0, -1, {1, 2}, default_cone_radii(0.05), default_cone_directions(), b), std::invalid_argument);
}

TEST(FourLevel, Examples) {
  const PlaneWaveBasis b(6);
  const double gamma = 0.05;
  EXPECT_LE(four_level_check(gamma * std::exp(kPi / 2), 2 * kPi, b), 5 * gamma * gamma);
  EXPECT_EQ(four_level_check(0.0, 2 * kPi, b), 0.0);
  EXPECT_THROW(four_level_check(1.0, 0.0, b), std::invalid_argument);

  // At B = 3 pi the four levels pair up at 1/2 +- gamma / sqrt 2.
  const double B = 3 * kPi;
  const auto e = bands(EffectiveParams::from_gamma(gamma, B), kCorner, b, 4);
  const double s = gamma / std::numbers::sqrt2;
  EXPECT_NEAR(e(0), 0.5 - s, 5 * gamma * gamma);
  EXPECT_NEAR(e(1), 0.5 - s, 5 * gamma * gamma);
  EXPECT_NEAR(e(2), 0.5 + s, 5 * gamma * gamma);
  EXPECT_NEAR(e(3), 0.5 + s, 5 * gamma * gamma);
  EXPECT_LE(four_level_check(gamma * std::exp(B / 4), B, b), 5 * gamma * gamma);
}
