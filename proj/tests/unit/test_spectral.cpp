#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "robinfluct/spectral.hpp"

using namespace robinfluct;
using std::numbers::pi;

TEST(Spectral, UnitIntervalEigenvalues) {
  const auto modes = enumerate_modes(BoxDomain::unit(1), 1.0, 6);
  ASSERT_EQ(modes.size(), 6u);
  for (int m = 0; m < 6; ++m) {
    EXPECT_EQ(modes[m].multi_index[0], m);
    EXPECT_NEAR(modes[m].eigenvalue, pi * pi * m * m / 2.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(modes[0].norm_const, 1.0);
  EXPECT_NEAR(modes[1].norm_const, std::sqrt(2.0), 1e-15);
}

TEST(Spectral, DiffusivityAndSideLengthScaling) {
  const BoxDomain dom({{0.0, 2.0}});
  const auto modes = enumerate_modes(dom, 3.0, 3);
  EXPECT_NEAR(modes[2].eigenvalue, 1.5 * pi * pi * 1.0, 1e-12);  // m = 2, L = 2
  EXPECT_NEAR(modes[2].norm_const, 1.0, 1e-15);
}

TEST(Spectral, SquareMultiplicityAndTieOrder) {
  const auto modes = enumerate_modes(BoxDomain::unit(2), 1.0, 4);
  EXPECT_DOUBLE_EQ(modes[1].eigenvalue, modes[2].eigenvalue);
  EXPECT_EQ(modes[1].multi_index[0], 0);
  EXPECT_EQ(modes[1].multi_index[1], 1);
  EXPECT_EQ(modes[2].multi_index[0], 1);
  EXPECT_EQ(modes[3].multi_index[0], 1);
  EXPECT_EQ(modes[3].multi_index[1], 1);
}

TEST(Spectral, ModesBelowAgreesWithEnumeration) {
  const BoxDomain dom({{0.0, 1.0}, {0.0, 1.5}});
  const auto all = enumerate_modes(dom, 1.0, 40);
  const auto below = modes_below(dom, 1.0, all[25].eigenvalue);
  ASSERT_GE(below.size(), 26u);
  for (std::size_t k = 0; k < 26; ++k) EXPECT_EQ(below[k].multi_index, all[k].multi_index);
  EXPECT_EQ(static_cast<long long>(below.size()), eigenvalue_count(dom, 1.0, all[25].eigenvalue));
}

TEST(Spectral, EvaluationAndGradient) {
  const BoxDomain dom = BoxDomain::unit(2);
  const std::vector<int> mi{1, 2};
  const EigenMode m = make_mode(dom, 1.0, mi);
  const Point x{0.3, 0.2, 0.0};
  const double v = 2.0 * std::cos(pi * 0.3) * std::cos(2.0 * pi * 0.2);
  EXPECT_NEAR(eval_eigenfunction(dom, m, x), v, 1e-14);
  const Point g = eigenfunction_gradient(dom, m, x);
  EXPECT_NEAR(g[0], -2.0 * pi * std::sin(pi * 0.3) * std::cos(2.0 * pi * 0.2), 1e-13);
  EXPECT_NEAR(g[1], -4.0 * pi * std::cos(pi * 0.3) * std::sin(2.0 * pi * 0.2), 1e-13);
  EXPECT_THROW(eval_eigenfunction(dom, m, Point{1.2, 0.5, 0.0}), DomainError);
  EXPECT_DOUBLE_EQ(eigenfunction_sup_norm(m), 2.0);
}

TEST(Spectral, BoundaryTrace) {
  const BoxDomain dom = BoxDomain::unit(1);
  const std::vector<int> zero{0}, three{3};
  EXPECT_NEAR(eigenfunction_boundary_trace(dom, make_mode(dom, 1.0, zero)), 2.0, 1e-14);
  EXPECT_NEAR(eigenfunction_boundary_trace(dom, make_mode(dom, 1.0, three)), 4.0, 1e-14);
  const BoxDomain sq = BoxDomain::unit(2);
  const std::vector<int> m{1, 0};
  // faces x=0, x=1 carry phi^2 = 2 over length 1; faces y=0,1 carry 2cos^2 -> 1 each
  EXPECT_NEAR(eigenfunction_boundary_trace(sq, make_mode(sq, 1.0, m)), 6.0, 1e-12);
}

TEST(Spectral, WeylConstants) {
  EXPECT_NEAR(weyl_constant(BoxDomain::unit(1), 1.0), std::sqrt(2.0) / pi, 1e-15);
  EXPECT_NEAR(weyl_constant(BoxDomain::unit(2), 1.0), 1.0 / (2.0 * pi), 1e-15);
  const double r = weyl_ratio(BoxDomain::unit(1), 1.0, 2e7, 2000);
  EXPECT_NEAR(r / (std::sqrt(2.0) / pi), 1.0, 0.01);
  EXPECT_THROW(weyl_ratio(BoxDomain::unit(1), 1.0, 10.0, 100), std::invalid_argument);
}

TEST(Spectral, EigenfunctionBounds) {
  const auto modes = enumerate_modes(BoxDomain::unit(3), 1.0, 100);
  const EigenBoundsReport r = eigenfunction_bounds_check(BoxDomain::unit(3), modes);
  EXPECT_TRUE(r.uniform_bound_holds);
  EXPECT_NEAR(r.uniform_bound, std::pow(2.0, 1.5), 1e-14);
  EXPECT_GT(r.sup_constant, 0.0);
}

TEST(Spectral, HilbertScales) {
  const auto modes = enumerate_modes(BoxDomain::unit(1), 1.0, 3);
  SpectralCoeffs a{{1.0, 2.0, 0.0}}, b{{1.0, 1.0, 5.0}};
  const double expect = 1.0 + std::pow(1.0 + pi * pi / 2.0, 2.0) * 2.0;
  EXPECT_NEAR(h_alpha_inner(a, b, 2.0, modes), expect, 1e-10);
  SpectralCoeffs c{{1.0}};
  EXPECT_THROW(h_alpha_inner(a, c, 1.0, modes), std::invalid_argument);
  SpectralCoeffs d{{1.0, 1.0, 1.0, 1.0}};
  EXPECT_THROW(h_alpha_inner(d, d, 1.0, modes), std::invalid_argument);
  const std::vector<double> p{1.0, 1.0};
  EXPECT_NEAR(h_minus_alpha_norm(p, 1.0, modes), 1.0 + 1.0 / (1.0 + pi * pi / 2.0), 1e-14);
}

TEST(Spectral, ModesCsv) {
  const auto modes = enumerate_modes(BoxDomain::unit(2), 1.0, 3);
  std::ostringstream os;
  write_modes_csv(os, BoxDomain::unit(2), modes);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,multi_index,lambda,sup_norm");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}
