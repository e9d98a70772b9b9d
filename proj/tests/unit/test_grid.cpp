#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "robinfluct/grid.hpp"

using namespace robinfluct;

TEST(Grid, TrapezoidIntegral) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto f = GridFunction::sample(dom, 401, [](const Point& x) { return x[0] * x[0]; });
  EXPECT_NEAR(f.integral(), 1.0 / 3.0 + 1.0 / (6.0 * 400.0 * 400.0), 1e-14);
  const BoxDomain sq = BoxDomain::unit(2);
  const auto g = GridFunction::sample(sq, 11, [](const Point& x) { return x[0] + 2.0 * x[1]; });
  EXPECT_NEAR(g.integral(), 1.5, 1e-14);
}

TEST(Grid, ShapeAndIndexing) {
  const BoxDomain dom({{0.0, 1.0}, {0.0, 2.0}});
  const std::vector<int> shape{5, 9};
  GridFunction f(dom, shape);
  EXPECT_EQ(f.size(), 45u);
  EXPECT_DOUBLE_EQ(f.spacing(1), 0.25);
  const auto m = f.multi_index(13);
  EXPECT_EQ(f.flat_index(m), 13u);
  EXPECT_TRUE(f.on_boundary(0));
  EXPECT_THROW(GridFunction(dom, 2), std::invalid_argument);
}

TEST(Grid, InterpolationIsExactForBilinear) {
  const BoxDomain sq = BoxDomain::unit(2);
  const auto f = GridFunction::sample(sq, 7, [](const Point& x) { return 1.0 + x[0] - 3.0 * x[1]; });
  EXPECT_NEAR(f.interpolate(Point{0.123, 0.77, 0}), 1.0 + 0.123 - 2.31, 1e-14);
}

TEST(Grid, InnerRequiresConformingGrids) {
  const BoxDomain dom = BoxDomain::unit(1);
  GridFunction a(dom, 11), b(dom, 12);
  EXPECT_THROW((void)a.inner(b), std::invalid_argument);
}

TEST(Grid, SurfaceWeights) {
  const GridFunction f(BoxDomain::unit(1), 5);
  const auto w = f.surface_weights();
  EXPECT_DOUBLE_EQ(w.front(), 1.0);
  EXPECT_DOUBLE_EQ(w[2], 0.0);
  EXPECT_DOUBLE_EQ(w.back(), 1.0);
  const GridFunction g(BoxDomain::unit(2), 9);
  double s = 0.0;
  for (double v : g.surface_weights()) s += v;
  EXPECT_NEAR(s, 4.0, 1e-14);
}

TEST(Grid, ArithmeticAndCsv) {
  const BoxDomain dom = BoxDomain::unit(1);
  auto a = GridFunction::sample(dom, 3, [](const Point& x) { return x[0]; });
  auto b = a + a;
  b *= 0.5;
  EXPECT_DOUBLE_EQ((b - a).sup_norm(), 0.0);
  std::ostringstream os;
  a.write_csv(os);
  EXPECT_EQ(os.str(), "x0,value\n0,0\n0.5,0.5\n1,1\n");
}
