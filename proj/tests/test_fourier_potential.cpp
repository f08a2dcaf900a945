#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cavband/fourier_potential.hpp"
#include "support.hpp"

using namespace cavband;

TEST(StandardPotential, Coefficients) {
  const auto v = standard_potential(1.0);
  EXPECT_EQ(v.size(), 4u);
  for (FreqVector n : {FreqVector{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) EXPECT_EQ(v.coeff(n), cplx(0.5));
  EXPECT_TRUE(standard_potential(0.0).empty());
  const auto neg = standard_potential(-2.0);
  for (const auto& [n, c] : neg.coeffs()) EXPECT_EQ(c, cplx(-1.0));
}

TEST(HeatSmooth, Examples) {
  const double B = 2.0 * std::numbers::pi;
  const auto w = heat_smooth(standard_potential(0.3), B);
  for (const auto& [n, c] : w.coeffs())
    EXPECT_NEAR(std::abs(c - 0.15 * std::exp(-B / 4)), 0.0, 1e-16);

  testing_support::Gen g(1);
  const auto v = g.potential(2, 1.0);
  const auto same = heat_smooth(v, 0.0);
  for (const auto& [n, c] : v.coeffs()) EXPECT_EQ(same.coeff(n), c);

  FourierPotential one;
  one.set_pair({1, 1}, 1.0);
  EXPECT_NEAR(heat_smooth(one, 4.0).coeff({1, 1}).real(), 0.1353352832366127, 1e-15);
  EXPECT_THROW(heat_smooth(one, -1.0), std::invalid_argument);
}

TEST(HeatSmooth, SemigroupProperty) {
  testing_support::Gen g(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = g.potential(3, 1.0);
    const double b1 = g.uniform(0, 10), b2 = g.uniform(0, 10);
    const auto twice = heat_smooth(heat_smooth(v, b1), b2);
    const auto once = heat_smooth(v, b1 + b2);
    ASSERT_EQ(twice.size(), once.size());
    for (const auto& [n, c] : once.coeffs()) EXPECT_LE(std::abs(twice.coeff(n) - c), 1e-14);
  }
}

TEST(HeatSmooth, RealFieldAndNoGrowth) {
  testing_support::Gen g(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = g.potential(2, 1.0);
    const auto w = heat_smooth(v, g.uniform(0, 20));
    for (const auto& [n, c] : w.coeffs()) EXPECT_LE(std::abs(c), std::abs(v.coeff(n)));
    for (int s = 0; s < 20; ++s) EXPECT_NO_THROW(evaluate(w, g.uniform(-10, 10), g.uniform(-10, 10)));
  }
}

TEST(Evaluate, Examples) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(evaluate(standard_potential(1.0), 0, 0), 2.0, 1e-15);
  EXPECT_NEAR(evaluate(standard_potential(1.0), pi, 0), 0.0, 1e-15);
  EXPECT_NEAR(evaluate(standard_potential(3.0), pi / 2, pi), -3.0, 1e-14);
}

TEST(FourierPotential, RejectsBrokenSymmetry) {
  FourierPotential::Coefficients c{{{1, 0}, cplx(1.0, 0.5)}, {{-1, 0}, cplx(1.0, 0.5)}};
  EXPECT_THROW(FourierPotential::from_coefficients(c), std::invalid_argument);
  c[{-1, 0}] = cplx(1.0, -0.5);
  EXPECT_NO_THROW(FourierPotential::from_coefficients(c));
  FourierPotential v;
  EXPECT_THROW(v.set_pair({0, 0}, cplx(1.0, 1.0)), std::invalid_argument);
}

TEST(FourierPotential, MaxFreqAndDefect) {
  testing_support::Gen g(4);
  const auto v = g.potential(3, 1.0);
  EXPECT_EQ(v.max_freq(), 3);
  EXPECT_EQ(v.hermitian_defect(), 0.0);
  EXPECT_EQ(FourierPotential{}.max_freq(), 0);
}

TEST(FourierPotential, JsonRoundTrip) {
  testing_support::Gen g(5);
  const auto v = g.potential(2, 1.0);
  const auto back = potential_from_json(to_json(v));
  EXPECT_EQ(back.coeffs(), v.coeffs());

  const auto half = potential_from_json(nlohmann::json::parse(R"([{"n1":1,"n2":0,"re":0.5,"im":0.25}])"));
  EXPECT_EQ(half.coeff({-1, 0}), cplx(0.5, -0.25));
  EXPECT_THROW(potential_from_json(nlohmann::json::parse(R"([{"n1":1,"n2":0,"re":1,"amp":2}])")),
               std::invalid_argument);
  EXPECT_THROW(potential_from_json(nlohmann::json::parse(R"([{"n1":1,"n2":0,"re":1},{"n1":1,"n2":0,"re":1}])")),
               std::invalid_argument);
}
