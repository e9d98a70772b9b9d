#include <gtest/gtest.h>

#include <cmath>

#include "robinfluct/geometry.hpp"

using namespace robinfluct;

TEST(Geometry, FoldIsIdentityInside) {
  const BoxDomain dom = BoxDomain::unit(2);
  const Point x{0.25, 0.75, 0.0};
  EXPECT_EQ(dom.fold(x), x);
  EXPECT_EQ(dom.fold(Point{0.0, 1.0, 0.0}), (Point{0.0, 1.0, 0.0}));
}

TEST(Geometry, FoldReflectsAndIsPeriodic) {
  const BoxDomain dom({{-1.0, 2.0}});
  EXPECT_NEAR(dom.fold_axis(-1.5, 0), -0.5, 1e-15);
  EXPECT_NEAR(dom.fold_axis(2.25, 0), 1.75, 1e-15);
  for (double x : {-7.3, 0.4, 3.9, 11.1}) {
    EXPECT_NEAR(dom.fold_axis(x, 0), dom.fold_axis(x + 6.0, 0), 1e-12);
    EXPECT_NEAR(dom.fold_axis(x, 0), dom.fold_axis(-2.0 - x, 0), 1e-12);  // even about lo
  }
}

TEST(Geometry, FoldHandlesLargeExcursions) {
  const BoxDomain dom = BoxDomain::unit(1);
  EXPECT_NEAR(dom.fold_axis(1e6 + 0.25, 0), 0.25, 1e-9);
  EXPECT_NEAR(dom.fold_axis(-1e6 - 0.25, 0), 0.25, 1e-9);
  const double y = dom.fold_axis(12345.678, 0);
  EXPECT_GE(y, 0.0);
  EXPECT_LE(y, 1.0);
}

TEST(Geometry, DistanceToBoundary) {
  const BoxDomain dom = BoxDomain::unit(2);
  EXPECT_DOUBLE_EQ(dom.dist_to_boundary(Point{0.0, 0.3, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(dom.dist_to_boundary(Point{0.5, 0.5, 0.0}), 0.5);
  EXPECT_NEAR(dom.dist_to_boundary(Point{0.9, 0.4, 0.0}), 0.1, 1e-15);
  EXPECT_THROW(dom.dist_to_boundary(Point{1.1, 0.5, 0.0}), DomainError);
}

TEST(Geometry, StripVolumeAndMinkowskiLimit) {
  const BoxDomain sq = BoxDomain::unit(2);
  EXPECT_NEAR(sq.strip_volume(0.1), 1.0 - 0.64, 1e-14);
  EXPECT_THROW(sq.strip_volume(0.5), std::invalid_argument);
  EXPECT_THROW(sq.strip_volume(0.0), std::invalid_argument);
  const BoxDomain box({{0.0, 2.0}, {0.0, 1.0}, {0.0, 3.0}});
  double prev = INFINITY;
  for (double d : {0.1, 0.01, 0.001}) {
    const double err = std::abs(box.strip_volume(d) / d - box.surface_measure());
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev / box.surface_measure(), 0.01);
}

TEST(Geometry, SurfaceMeasure) {
  EXPECT_DOUBLE_EQ(BoxDomain::unit(1).surface_measure(), 2.0);
  EXPECT_DOUBLE_EQ(BoxDomain::unit(2).surface_measure(), 4.0);
  EXPECT_DOUBLE_EQ(BoxDomain::unit(3).surface_measure(), 6.0);
  const BoxDomain box({{0.0, 2.0}, {0.0, 3.0}});
  EXPECT_NEAR(box.surface_quadrature([](const Point&) { return 1.0; }, 4), 10.0, 1e-13);
  // int over the boundary of x^2 + y on [0,2]x[0,3]
  const double q = box.surface_quadrature([](const Point& x) { return x[0] * x[0] + x[1]; }, 8);
  const double exact = (0.0 + 4.0) * 3.0 + 2.0 * 4.5 + (8.0 / 3.0) * 2.0 + 3.0 * 2.0;
  EXPECT_NEAR(q, exact, 1e-12);
  EXPECT_DOUBLE_EQ(BoxDomain::unit(1).surface_quadrature([](const Point&) { return 1.0; }, 2), 2.0);
}

TEST(Geometry, RejectsBadBoxes) {
  const std::vector<double> lo{0.0}, hi{0.0};
  EXPECT_THROW(BoxDomain(lo, hi), std::invalid_argument);
  const std::vector<double> lo4(4, 0.0), hi4(4, 1.0);
  EXPECT_THROW(BoxDomain(lo4, hi4), std::invalid_argument);
}

TEST(Geometry, Faces) {
  EXPECT_EQ(faces(BoxDomain::unit(3)).size(), 6u);
  EXPECT_EQ(faces(BoxDomain::unit(1)).size(), 2u);
}
