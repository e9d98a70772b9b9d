#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "robinfluct/fluctuation.hpp"
#include "robinfluct/stats.hpp"

using namespace robinfluct;

namespace {

std::vector<GridFunction> mode_grids(const BoxDomain& dom, const std::vector<EigenMode>& modes,
                                     std::initializer_list<int> idx, int nodes) {
  std::vector<GridFunction> out;
  for (int k : idx)
    out.push_back(GridFunction::sample(dom, nodes, [&](const Point& x) {
      return eval_eigenfunction_unchecked(dom, modes[static_cast<std::size_t>(k)], x);
    }));
  return out;
}

}  // namespace

TEST(Fluctuation, InitialCovarianceOfUniformIsIdentity) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 5);
  const auto fs = mode_grids(dom, modes, {1, 2, 3}, 801);
  const auto u0 = GridFunction::sample(dom, 801, [](const Point&) { return 1.0; });
  const Eigen::MatrixXd c = initial_covariance(fs, u0);
  EXPECT_LT((c - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Fluctuation, SampleY0MatchesCovariance) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 5);
  const auto fs = mode_grids(dom, modes, {0, 1}, 201);
  const auto u0 = GridFunction::sample(dom, 201, [](const Point& x) { return 0.5 + x[0]; });
  const Eigen::MatrixXd target = initial_covariance(fs, u0);
  const Eigen::MatrixXd draws = sample_Y0(fs, u0, 11, 40000);
  ASSERT_EQ(draws.rows(), 40000);
  const Eigen::MatrixXd emp = sample_covariance(draws);
  EXPECT_LT((emp - target).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_EQ(draws, sample_Y0(fs, u0, 11, 40000));
}

TEST(Fluctuation, StationaryCovarianceIsConstant) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 5);
  const auto fs = mode_grids(dom, modes, {1, 2}, 401);
  const auto u0 = GridFunction::sample(dom, 401, [](const Point&) { return 1.0; });
  PdeOptions opt;
  opt.dt = 1e-4;
  opt.rannacher_steps = 0;
  const KillingRate zero = KillingRate::constant(0.0);
  const TimeSeries path = solve_forward(u0, zero, 1.0, 0.2, opt);
  const CovarianceSlice s = covariance_Y(fs, 0.2, path, zero, 1.0, opt);
  EXPECT_LT((s.total - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Fluctuation, OuMarginalsWithoutKilling) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 3);
  const auto fs = mode_grids(dom, modes, {1}, 201);
  const auto u0 = GridFunction::sample(dom, 201, [](const Point&) { return 1.0; });
  PdeOptions opt;
  opt.dt = 1.0 / 1024;
  opt.rannacher_steps = 0;
  const KillingRate zero = KillingRate::constant(0.0);
  const TimeSeries path = solve_forward(u0, zero, 1.0, 0.25, opt);
  const OuPlan plan = prepare_ou(fs[0], {0.125, 0.25}, path, zero, 1.0, opt);
  for (double v : plan.marginal_variance) EXPECT_NEAR(v, 1.0, 1e-3);
  const auto a = simulate_OU_path(plan, 5, 0);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a, simulate_OU_path(plan, 5, 0));
  EXPECT_NE(a, simulate_OU_path(plan, 5, 1));
}

TEST(Fluctuation, ComputeFieldScalesAndCenters) {
  ReplicaResult r;
  r.times = {0.0, 0.5};
  r.pairings = {{1.0, 0.5}, {0.9, 0.25}};
  const auto f = compute_field({r}, {"a", "b"}, 100, {0.0, 0.5}, {{1.0, 0.5}, {0.8, 0.2}});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f[0].values[1][0], 1.0, 1e-12);
  EXPECT_NEAR(f[0].values[1][1], 0.5, 1e-12);
  EXPECT_THROW(compute_field({r}, {"a", "b"}, 100, {0.0}, {{1.0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(compute_field({r}, {"a"}, 100, {0.0, 0.5}, {{1.0}, {0.8}}), std::invalid_argument);
  std::ostringstream os;
  write_field_csv(os, f);
  EXPECT_EQ(os.str().substr(0, 27), "replica,t,observable_id,val");
}

TEST(Fluctuation, FieldNormWeights) {
  const BoxDomain dom = BoxDomain::unit(1);
  const auto modes = enumerate_modes(dom, 1.0, 3);
  const std::vector<double> v{1.0, 2.0};
  EXPECT_DOUBLE_EQ(field_h_norm(v, 0.0, modes), 5.0);
  EXPECT_NEAR(field_h_norm(v, 1.0, modes), 1.0 + 4.0 / (1.0 + modes[1].eigenvalue), 1e-14);
  EXPECT_THROW(field_h_norm(v, -1.0, modes), std::invalid_argument);
}
