#include <gtest/gtest.h>

#include <cmath>

#include "robinfluct/particles.hpp"

using namespace robinfluct;

namespace {

ReplicaSpec small_spec() {
  ReplicaSpec sp;
  sp.domain = BoxDomain::unit(1);
  sp.cfg = PathConfig::local_time(1e-3, 1.0, 0.1);
  sp.q = KillingRate::constant(1.0);
  sp.u0 = InitialDensity::uniform(sp.domain, 1.0);
  sp.particles = 3000;
  sp.seed = 31;
  const auto modes = enumerate_modes(sp.domain, 1.0, 3);
  sp.observables = {constant_observable(sp.domain, 1.0), eigen_observable(sp.domain, modes[1]),
                    eigen_observable(sp.domain, modes[2])};
  sp.record_steps = {0, 50, 100};
  return sp;
}

}  // namespace

TEST(Particles, InitialDensities) {
  const BoxDomain dom = BoxDomain::unit(2);
  const auto u = InitialDensity::uniform(dom, 0.5);
  EXPECT_DOUBLE_EQ(u.mass, 0.5);
  const std::vector<double> lo{0.0, 0.0}, hi{0.5, 0.5};
  const auto b = InitialDensity::box_indicator(dom, lo, hi, 2.0);
  EXPECT_DOUBLE_EQ(b.mass, 0.5);
  EXPECT_DOUBLE_EQ(b(Point{0.25, 0.25, 0}), 2.0);
  EXPECT_DOUBLE_EQ(b(Point{0.75, 0.25, 0}), 0.0);
  const std::vector<int> m{1, 0};
  const auto c = InitialDensity::cosine(dom, 1.0, 0.5, m);
  EXPECT_NEAR(c.mass, 1.0, 1e-14);
  EXPECT_THROW(InitialDensity::cosine(dom, 0.2, 0.5, m), std::invalid_argument);
}

TEST(Particles, InitEnsemble) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto e = init_ensemble(dom, 20000, InitialDensity::uniform(dom, 0.5), 3);
  const double frac = static_cast<double>(e.alive_count()) / 20000.0;
  EXPECT_NEAR(frac, 0.5, 4.0 * std::sqrt(0.25 / 20000.0));
  for (std::size_t i = 0; i < e.size(); ++i) ASSERT_TRUE(dom.contains(e.position(i)));
  EXPECT_THROW(init_ensemble(dom, 10, InitialDensity::uniform(dom, 2.0), 3), std::invalid_argument);
  const auto empty = init_ensemble(dom, 0, InitialDensity::uniform(dom, 1.0), 3);
  EXPECT_EQ(empirical_pairing(empty, [](const Point&) { return 1.0; }), 0.0);
}

TEST(Particles, StepWithZeroDtIsIdentity) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto e = init_ensemble(dom, 100, InitialDensity::uniform(dom, 1.0), 4);
  const auto f = step_ensemble(e, dom, 0.0, KillingRate::constant(1.0),
                               PathConfig::local_time(1e-3, 1.0, 1.0));
  EXPECT_EQ(f.positions, e.positions);
  EXPECT_EQ(f.alive_count(), e.alive_count());
}

TEST(Particles, SteppingMatchesFusedReplica) {
  ReplicaSpec sp = small_spec();
  sp.particles = 300;
  const ReplicaResult fused = simulate_replica(sp, 1);
  auto e = init_ensemble(sp.domain, sp.particles, sp.u0, sp.seed, sp.replica);
  for (int s = 0; s < 100; ++s) e = step_ensemble(e, sp.domain, sp.cfg.dt, sp.q, sp.cfg);
  const double one = empirical_pairing(e, [](const Point&) { return 1.0; });
  EXPECT_NEAR(fused.pairings.back()[0], one, 1e-12);
  EXPECT_NEAR(fused.alive_fraction.back(), static_cast<double>(e.alive_count()) / 300.0, 1e-15);
}

TEST(Particles, ReplicaIsIndependentOfWorkerCount) {
  const ReplicaSpec sp = small_spec();
  const ReplicaResult a = simulate_replica(sp, 1);
  const ReplicaResult b = simulate_replica(sp, 3);
  EXPECT_EQ(a.pairings, b.pairings);
  EXPECT_EQ(a.alive_fraction, b.alive_fraction);
  EXPECT_EQ(a.times.size(), 3u);
  EXPECT_DOUBLE_EQ(a.times[1], 0.05);
}

TEST(Particles, NoKillingKeepsEveryone) {
  ReplicaSpec sp = small_spec();
  sp.q = KillingRate::constant(0.0);
  const ReplicaResult r = simulate_replica(sp, 2);
  EXPECT_DOUBLE_EQ(r.alive_fraction.back(), 1.0);
  EXPECT_DOUBLE_EQ(r.pairings.back()[0], 1.0);
}

TEST(Particles, MartingaleIncrement) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 2);
  const Observable phi = eigen_observable(dom, modes[1]);
  const Point x{0.3, 0, 0};
  const auto none = martingale_increment(phi, x, x, 0.0, false, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(none.increment, 0.0);
  EXPECT_DOUBLE_EQ(none.predictable, 0.0);
  // a kill with probability-one hazard removes phi(x) and compensates in full
  const auto kill = martingale_increment(phi, x, x, INFINITY, true, 0.0, 1.0);
  EXPECT_NEAR(kill.increment, -phi.value(x) + phi.value(x), 1e-15);
  Observable bare;
  bare.value = [](const Point&) { return 1.0; };
  EXPECT_FALSE(bare.has_derivatives());
  std::vector<ParticleEnsemble> traj{init_ensemble(dom, 5, InitialDensity::uniform(dom, 1.0), 1)};
  EXPECT_THROW(martingale_track(traj, bare, PathConfig::local_time(1e-3, 1.0, 1.0)),
               std::invalid_argument);
}

TEST(Particles, MartingaleTrackedInReplica) {
  ReplicaSpec sp = small_spec();
  sp.observables.clear();
  sp.record_steps = {100};
  sp.martingale_observable = eigen_observable(sp.domain, enumerate_modes(sp.domain, 1.0, 2)[1]);
  const ReplicaResult r = simulate_replica(sp, 1);
  ASSERT_TRUE(r.martingale.has_value());
  EXPECT_EQ(r.martingale->times.size(), 101u);
  EXPECT_GT(r.martingale->predictable_qv.back(), 0.0);
  EXPECT_GT(r.martingale->realized_qv.back(), 0.0);
}
