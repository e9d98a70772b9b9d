#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "robinfluct/pde.hpp"

using namespace robinfluct;
using std::numbers::pi;

namespace {

double sup_diff(const GridFunction& a, const GridFunction& b) { return (a - b).sup_norm(); }

// <Q_{0,t} 1, 1> on [0,1] with c = 1 and constant q: only the even Robin
// modes cos(k (x - 1/2)) contribute, with k tan(k/2) = 2q.
double robin_series_mass(double q, double t) {
  const double beta = robin_flux_coefficient(q, 1.0);
  double sum = 0.0;
  for (int n = 0; n < 200; ++n) {
    auto f = [beta](double k) { return k * std::sin(0.5 * k) - beta * std::cos(0.5 * k); };
    double a = 2.0 * pi * n, b = 2.0 * pi * n + pi;
    std::uintmax_t iters = 200;
    const auto [r0, r1] = boost::math::tools::toms748_solve(
        f, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
    const double k = 0.5 * (r0 + r1);
    const double c1 = 2.0 * std::sin(0.5 * k) / k;
    const double norm = 0.5 + std::sin(k) / (2.0 * k);
    sum += c1 * c1 / norm * std::exp(-0.5 * k * k * t);
  }
  return sum;
}

}  // namespace

TEST(Pde, FluxCoefficient) {
  EXPECT_DOUBLE_EQ(robin_flux_coefficient(1.5, 0.5), 6.0);
  EXPECT_DOUBLE_EQ(robin_flux_coefficient(0.0, 2.0), 0.0);
}

TEST(Pde, OptionsValidate) {
  PdeOptions o;
  o.dt = -1.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = PdeOptions{};
  o.theta = 0.2;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(Pde, RobinSeriesOracle) {
  const BoxDomain dom = BoxDomain::unit(1);
  const GridFunction one = GridFunction::sample(dom, 401, [](const Point&) { return 1.0; });
  PdeOptions opt;
  opt.dt = 1e-4;
  for (double q : {0.5, 2.0}) {
    const KillingRate rate = KillingRate::constant(q);
    for (double t : {0.05, 0.3}) {
      const double numeric = solve_backward_Q(one, 0.0, t, rate, 1.0, opt).integral();
      EXPECT_NEAR(numeric, robin_series_mass(q, t), 2e-5) << "q=" << q << " t=" << t;
    }
  }
}

TEST(Pde, EigenmodeDecayWithoutKilling) {
  const BoxDomain dom({{0.0, 1.0}, {0.0, 2.0}});
  const auto modes = enumerate_modes(dom, 0.7, 4);
  PdeOptions opt;
  opt.dt = 1e-3;
  for (std::size_t j = 1; j < modes.size(); ++j) {
    const auto f = GridFunction::sample(dom, 81, [&](const Point& x) {
      return eval_eigenfunction_unchecked(dom, modes[j], x);
    });
    GridFunction exact = f;
    exact *= std::exp(-modes[j].eigenvalue * 0.2);
    const auto num = solve_backward_Q(f, 0.0, 0.2, KillingRate::constant(0.0), 0.7, opt);
    EXPECT_LT(sup_diff(num, exact) / f.sup_norm(), 5e-3) << "mode " << j;
  }
}

TEST(Pde, ForwardBackwardDuality) {
  const BoxDomain dom = BoxDomain::unit(1);
  const KillingRate q = KillingRate::constant(1.3);
  const auto u0 = GridFunction::sample(dom, 201, [](const Point& x) { return 1.0 + x[0] * x[0]; });
  const auto phi = GridFunction::sample(dom, 201, [](const Point& x) { return std::cos(2.0 * x[0]); });
  PdeOptions opt;
  opt.dt = 1e-3;
  const double T = 0.25;
  const TimeSeries fwd = solve_forward(u0, q, 1.0, T, opt);
  const double lhs = phi.inner(fwd.snapshots.back());
  const double rhs = solve_backward_Q(phi, 0.0, T, q, 1.0, opt).inner(u0);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
}

TEST(Pde, MassDecreasesUnderKilling) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto u0 = GridFunction::sample(dom, 101, [](const Point&) { return 1.0; });
  PdeOptions opt;
  opt.dt = 1e-3;
  opt.record_every = 10;
  const TimeSeries fwd = solve_forward(u0, KillingRate::constant(1.0), 1.0, 0.2, opt);
  ASSERT_EQ(fwd.times.size(), fwd.snapshots.size());
  double prev = u0.integral();
  for (const auto& s : fwd.snapshots) {
    EXPECT_LE(s.integral(), prev + 1e-14);
    prev = s.integral();
  }
  EXPECT_LT(prev, 1.0);
}

TEST(Pde, HeatKernelImagesAndSeries) {
  const BoxDomain dom = BoxDomain::unit(1);
  const Point x{0.3, 0, 0}, y{0.8, 0, 0};
  EXPECT_NEAR(heat_kernel_image(dom, 1.0, 0.05, x, y), heat_kernel_image(dom, 1.0, 0.05, y, x), 1e-15);
  const auto ks = HeatKernelSeries::build(dom, 1.0, 60);
  EXPECT_NEAR(heat_kernel(0.1, x, y, ks), heat_kernel_image(dom, 1.0, 0.1, x, y), 1e-10);
  // mass one at every starting point
  double m = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const Point z{(i + 0.5) / n, 0, 0};
    m += heat_kernel_image(dom, 1.0, 0.02, x, z) / n;
  }
  EXPECT_NEAR(m, 1.0, 1e-8);
}

TEST(Pde, DuhamelAgreesWithCrankNicolson) {
  const BoxDomain dom = BoxDomain::unit(1);
  const KillingRate q = KillingRate::constant(1.0);
  const auto phi = GridFunction::sample(dom, 201, [](const Point& x) { return std::cos(pi * x[0]); });
  const DuhamelResult dr = duhamel_solve(phi, 0.0, 0.05, q, 1.0);
  ASSERT_TRUE(dr.converged) << dr.message;
  PdeOptions opt;
  opt.dt = 1e-4;
  EXPECT_LT(sup_diff(dr.value, solve_backward_Q(phi, 0.0, 0.05, q, 1.0, opt)), 1e-3);
}

TEST(Pde, StripPotentialConverges) {
  const BoxDomain dom = BoxDomain::unit(1);
  const KillingRate q = KillingRate::constant(1.0);
  const auto one = GridFunction::sample(dom, 801, [](const Point&) { return 1.0; });
  PdeOptions opt;
  opt.dt = 1e-4;
  const GridFunction ref = solve_backward_Q(one, 0.0, 0.1, q, 1.0, opt);
  double prev = INFINITY;
  for (double d : {0.1, 0.05, 0.025}) {
    const double e = sup_diff(solve_backward_QN(one, 0.0, 0.1, q, d, 1.0, opt), ref);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Pde, GammaIdentity) {
  for (int k = 1; k <= 6; ++k)
    for (double s : {0.25, 1.0}) {
      const GammaIdentity g = gamma_identity_check(k, s);
      EXPECT_NEAR(g.numeric, g.analytic, 1e-10 * g.analytic) << "k=" << k << " s=" << s;
    }
  EXPECT_DOUBLE_EQ(gamma_identity_check(2, 1.0).analytic, pi);
  EXPECT_THROW(gamma_identity_check(0, 1.0), std::invalid_argument);
  EXPECT_THROW(gamma_identity_check(7, 1.0), std::invalid_argument);
}
