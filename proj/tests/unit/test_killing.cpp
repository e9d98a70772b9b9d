#include <gtest/gtest.h>

#include "robinfluct/killing.hpp"

using namespace robinfluct;

TEST(Killing, PiecewiseLinear) {
  const PiecewiseLinear f({0.0, 1.0, 3.0}, {1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(f(-1.0), 1.0);
  EXPECT_DOUBLE_EQ(f(0.5), 2.0);
  EXPECT_DOUBLE_EQ(f(2.0), 2.5);
  EXPECT_DOUBLE_EQ(f(10.0), 2.0);
  EXPECT_DOUBLE_EQ(f.max_value(), 3.0);
  EXPECT_DOUBLE_EQ(f.min_value(), 1.0);
  EXPECT_THROW(PiecewiseLinear({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(PiecewiseLinear({0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST(Killing, ConstantRate) {
  const KillingRate q = KillingRate::constant(2.5);
  EXPECT_TRUE(q.is_constant());
  EXPECT_TRUE(q.is_time_homogeneous());
  EXPECT_FALSE(q.is_zero());
  EXPECT_DOUBLE_EQ(q(0.3, Point{0.1, 0.0, 0.0}), 2.5);
  EXPECT_DOUBLE_EQ(q.sup(), 2.5);
  EXPECT_TRUE(KillingRate::constant(0.0).is_zero());
  EXPECT_THROW(KillingRate::constant(-1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(q.scaled(-1.0)(0.0, Point{}), -2.5);
}

TEST(Killing, SeparableRate) {
  const KillingRate q = KillingRate::separable(PiecewiseLinear({0.0, 1.0}, {1.0, 3.0}), 1,
                                               PiecewiseLinear({0.0, 1.0}, {0.0, 2.0}));
  EXPECT_FALSE(q.is_constant());
  EXPECT_FALSE(q.is_time_homogeneous());
  EXPECT_DOUBLE_EQ(q(0.5, Point{0.9, 0.25, 0.0}), 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(q.sup(), 6.0);
  EXPECT_THROW(KillingRate::separable(PiecewiseLinear({0.0}, {-1.0}), 0,
                                      PiecewiseLinear({0.0}, {1.0})),
               std::invalid_argument);
}
