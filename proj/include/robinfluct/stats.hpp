#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>

namespace robinfluct {

/// Outcome of one check. `pass` is decided by the caller's rule applied to
/// statistic/p_value against threshold; metadata carries context numbers.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  bool pass = false;
  std::map<std::string, double> metadata;
};

struct MeanCI {
  double mean = 0.0;
  double half_width = 0.0;
  double std_error = 0.0;
};

/// Normal-approximation confidence interval; needs at least 2 samples.
MeanCI mean_ci(std::span<const double> samples, double level = 0.95);

double sample_mean(std::span<const double> samples);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> samples);

/// Two-sided one-sample KS test against a continuous CDF; asymptotic
/// Kolmogorov p-value with the Stephens small-sample correction.
TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double threshold);

/// KS against a normal with fitted mean and variance. Needs at least 50
/// samples and nonzero variance. Passes when p > threshold.
TestReport ks_normal(std::span<const double> samples, double threshold = 0.01);

struct MomentZ {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double skew_z = 0.0;
  double kurt_z = 0.0;
};

/// Sample skewness g1 and kurtosis b2 standardized by their exact normal-
/// theory means and variances. Needs at least 100 samples.
MomentZ moment_z(std::span<const double> samples);

struct Slope {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

/// Least-squares slope of log v on log h; at least 4 positive pairs.
Slope loglog_slope(std::span<const double> h, std::span<const double> v);

/// Pearson chi-square goodness of fit for equal expected cell counts.
TestReport chi_square_uniform(std::span<const std::uint64_t> counts, double threshold = 0.001);

/// Covariance of the columns; rows are samples (n - 1 normalization).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data);

/// Entrywise standard errors of sample_covariance by the nonparametric
/// bootstrap over rows; resampling indices come from the bootstrap stream.
Eigen::MatrixXd bootstrap_covariance_se(const Eigen::MatrixXd& data, int resamples,
                                        std::uint64_t seed);

}  // namespace robinfluct
