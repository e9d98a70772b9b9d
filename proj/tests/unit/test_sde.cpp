#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "robinfluct/sde.hpp"

using namespace robinfluct;

TEST(Sde, PathConfigs) {
  const PathConfig lt = PathConfig::local_time(1e-4, 2.0, 1.0, 1.5);
  EXPECT_NEAR(lt.strip_eps, 1.5 * std::sqrt(2e-4), 1e-15);
  EXPECT_EQ(lt.steps(), 10000u);
  const PathConfig sp = PathConfig::strip_potential(1e-3, 1.0, 0.5, 0.05);
  EXPECT_EQ(sp.mode, KillingMode::kStripPotential);
  EXPECT_EQ(sp.steps(), 500u);
  PathConfig bad = lt;
  bad.dt = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Sde, LocalTimeIncrement) {
  const BoxDomain dom = BoxDomain::unit(1);
  EXPECT_DOUBLE_EQ(local_time_increment(dom, Point{0.005, 0, 0}, 1e-4, 0.01), 1e-4 / 0.02);
  EXPECT_DOUBLE_EQ(local_time_increment(dom, Point{0.5, 0, 0}, 1e-4, 0.01), 0.0);
  EXPECT_DOUBLE_EQ(local_time_increment(dom, Point{0.995, 0, 0}, 1e-4, 0.01), 1e-4 / 0.02);
}

TEST(Sde, HazardIncrementModes) {
  const BoxDomain dom = BoxDomain::unit(1);
  const KillingRate q = KillingRate::constant(2.0);
  const PathConfig lt = PathConfig::local_time(1e-4, 1.0, 1.0);
  const Point edge{0.001, 0, 0}, mid{0.5, 0, 0};
  EXPECT_NEAR(hazard_increment(dom, edge, 0.0, 1e-4, q, lt), 2.0 * 1e-4 / lt.strip_eps, 1e-15);
  EXPECT_EQ(hazard_increment(dom, mid, 0.0, 1e-4, q, lt), 0.0);
  const PathConfig sp = PathConfig::strip_potential(1e-4, 1.0, 1.0, 0.05);
  EXPECT_NEAR(hazard_increment(dom, edge, 0.0, 1e-4, q, sp), 2.0 * 1e-4 / 0.05, 1e-15);
}

TEST(Sde, RbmStepStaysInDomain) {
  const BoxDomain dom = BoxDomain::unit(2);
  NormalStream s({5, 0, 0, Purpose::kTest});
  Point x = dom.center();
  for (int i = 0; i < 10000; ++i) {
    const double z[2] = {s.next() * 30.0, s.next() * 30.0};
    x = rbm_step(dom, x, 0.01, 1.0, z);
    ASSERT_TRUE(dom.contains(x));
  }
}

TEST(Sde, HazardStepKillsOnce) {
  const BoxDomain dom = BoxDomain::unit(1);
  const KillingRate q = KillingRate::constant(1.0);
  const PathConfig sp = PathConfig::strip_potential(0.1, 1.0, 10.0, 0.2);
  HazardState h;
  h.threshold = 1.0;
  int steps = 0;
  while (h.alive) {
    h = hazard_step(h, dom, Point{0.1, 0, 0}, 0.1 * (steps + 1), 0.1, q, sp);
    ++steps;
  }
  EXPECT_EQ(steps, 2);  // 0.5 per step
  EXPECT_NEAR(h.kill_time, 0.2, 1e-15);
  EXPECT_THROW(hazard_step(h, dom, Point{0.1, 0, 0}, 0.3, 0.1, q, sp), std::logic_error);
}

TEST(Sde, FeynmanKacWeight) {
  const BoxDomain dom = BoxDomain::unit(1);
  const PathConfig cfg = PathConfig::local_time(1e-3, 1.0, 0.1);
  const SampledPath p = simulate_path(dom, Point{0.5, 0, 0}, cfg, {9, 0, 0, Purpose::kMotion});
  EXPECT_EQ(p.points.size(), cfg.steps() + 1);
  EXPECT_DOUBLE_EQ(feynman_kac_weight(dom, p, KillingRate::constant(0.0), cfg), 1.0);
  const double w = feynman_kac_weight(dom, p, KillingRate::constant(3.0), cfg);
  EXPECT_GT(w, 0.0);
  EXPECT_LE(w, 1.0);
  const SampledPath again = simulate_path(dom, Point{0.5, 0, 0}, cfg, {9, 0, 0, Purpose::kMotion});
  EXPECT_EQ(again.points, p.points);
}

// Tanaka: for reflected Brownian motion started on the boundary,
// E L_t = E |B_t| = sqrt(2 c t / pi) with L the symmetric local time.
TEST(Sde, LocalTimeMeanMatchesTanaka) {
  const BoxDomain dom({{0.0, 10.0}});
  const double c = 1.0, t = 0.05, dt = 1e-5;
  const PathConfig cfg = PathConfig::local_time(dt, c, t);
  const int paths = 4000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < paths; ++i) {
    const SampledPath p =
        simulate_path(dom, Point{0.0, 0, 0}, cfg, {77, 0, static_cast<std::uint32_t>(i), Purpose::kMotion});
    double l = 0.0;
    for (std::size_t k = 1; k < p.points.size(); ++k)
      l += local_time_increment(dom, p.points[k], dt, cfg.strip_eps);
    sum += l;
    sq += l * l;
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sq / paths - mean * mean) / paths);
  const double exact = std::sqrt(2.0 * c * t / std::numbers::pi);
  EXPECT_LT(std::abs(mean - exact), 4.0 * se + 0.03 * exact);
}
