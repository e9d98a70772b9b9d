#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "robinfluct/rng.hpp"

using namespace robinfluct;

TEST(Rng, PhiloxKnownAnswers) {
  using W = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, SequentialMatchesRandomAccess) {
  const StreamId id{42, 3, 7, Purpose::kMotion};
  NormalStream s(id);
  UniformStream u(id);
  for (std::uint64_t i = 0; i < 37; ++i) {
    EXPECT_EQ(s.next(), normal_at(id, i));
    EXPECT_EQ(u.next(), uniform_at(id, i));
  }
  NormalStream mid(id, 10);
  EXPECT_EQ(mid.next(), normal_at(id, 10));
}

TEST(Rng, StreamsAreDistinct) {
  std::set<double> seen;
  for (std::uint32_t r = 0; r < 4; ++r)
    for (std::uint32_t p = 0; p < 4; ++p)
      for (auto purpose : {Purpose::kMotion, Purpose::kThreshold, Purpose::kInitial})
        seen.insert(uniform_at({1, r, p, purpose}, 0));
  EXPECT_EQ(seen.size(), 48u);
  EXPECT_NE(uniform_at({1, 0, 0, Purpose::kTest}, 0), uniform_at({2, 0, 0, Purpose::kTest}, 0));
}

TEST(Rng, NormalMoments) {
  NormalStream s({2024, 0, 0, Purpose::kTest});
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_LT(std::abs(m1), 4.0 / std::sqrt(n));
  EXPECT_LT(std::abs(m2 - 1.0), 4.0 * std::sqrt(2.0 / n));
  EXPECT_LT(std::abs(m4 - 3.0), 4.0 * std::sqrt(96.0 / n));
}

TEST(Rng, UniformsAreOpenInterval) {
  EXPECT_GT(to_unit_open(0), 0.0);
  EXPECT_LT(to_unit_open(0xffffffffu), 1.0);
}
