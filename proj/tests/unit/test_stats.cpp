#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "robinfluct/stats.hpp"

using namespace robinfluct;

namespace {

std::vector<double> normals(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

}  // namespace

TEST(Stats, MeanAndVariance) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(sample_mean(x), 2.5);
  EXPECT_DOUBLE_EQ(sample_variance(x), 5.0 / 3.0);
  const MeanCI ci = mean_ci(x);
  EXPECT_DOUBLE_EQ(ci.mean, 2.5);
  EXPECT_NEAR(ci.std_error, std::sqrt(5.0 / 12.0), 1e-15);
  EXPECT_NEAR(ci.half_width, 1.959964 * ci.std_error, 1e-5);
}

TEST(Stats, KsAcceptsNormalRejectsUniform) {
  const auto z = normals(2000, 3);
  EXPECT_TRUE(ks_normal(z).pass);
  std::vector<double> u(2000);
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (auto& x : u) x = ud(g);
  const TestReport r = ks_normal(u);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(Stats, KsAgainstCustomCdf) {
  std::vector<double> u(1000);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i + 0.5) / 1000.0;
  const TestReport r = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); }, 0.01);
  EXPECT_NEAR(r.statistic, 0.0005, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Stats, MomentZ) {
  const auto z = normals(5000, 8);
  const MomentZ m = moment_z(z);
  EXPECT_LT(std::abs(m.skew_z), 4.0);
  EXPECT_LT(std::abs(m.kurt_z), 4.0);
  std::vector<double> e(5000);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = z[i] * z[i];
  EXPECT_GT(moment_z(e).skew_z, 10.0);
}

TEST(Stats, LogLogSlope) {
  std::vector<double> h, v;
  for (int k = 1; k <= 6; ++k) {
    h.push_back(std::pow(2.0, -k));
    v.push_back(3.0 * std::pow(h.back(), 1.5));
  }
  const Slope s = loglog_slope(h, v);
  EXPECT_NEAR(s.slope, 1.5, 1e-12);
  EXPECT_NEAR(std::exp(s.intercept), 3.0, 1e-12);
  EXPECT_NEAR(s.std_error, 0.0, 1e-10);
}

TEST(Stats, ChiSquareUniform) {
  const std::vector<std::uint64_t> even{1000, 1010, 990, 1000};
  EXPECT_TRUE(chi_square_uniform(even).pass);
  const std::vector<std::uint64_t> skew{1300, 900, 900, 900};
  EXPECT_FALSE(chi_square_uniform(skew).pass);
}

TEST(Stats, CovarianceAndBootstrap) {
  const auto a = normals(4000, 21), b = normals(4000, 22);
  Eigen::MatrixXd data(4000, 2);
  for (int i = 0; i < 4000; ++i) {
    data(i, 0) = a[i];
    data(i, 1) = a[i] + b[i];
  }
  const Eigen::MatrixXd c = sample_covariance(data);
  EXPECT_NEAR(c(0, 0), 1.0, 0.08);
  EXPECT_NEAR(c(0, 1), 1.0, 0.08);
  EXPECT_NEAR(c(1, 1), 2.0, 0.15);
  EXPECT_DOUBLE_EQ(c(0, 1), c(1, 0));
  const Eigen::MatrixXd se = bootstrap_covariance_se(data, 200, 5);
  // var of the sample variance of N(0,1) is about 2/n
  EXPECT_NEAR(se(0, 0), std::sqrt(2.0 / 4000.0), 0.008);
  EXPECT_EQ(se, bootstrap_covariance_se(data, 200, 5));
}
