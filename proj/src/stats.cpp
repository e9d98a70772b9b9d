#include "robinfluct/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "robinfluct/quadrature.hpp"
#include "robinfluct/rng.hpp"

namespace robinfluct {

double sample_mean(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("sample_mean: no samples");
  return pairwise_sum(samples.data(), samples.size()) / static_cast<double>(samples.size());
}

double sample_variance(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("sample_variance: need at least 2 samples");
  const double m = sample_mean(samples);
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - m) * (samples[i] - m);
  return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(samples.size() - 1);
}

MeanCI mean_ci(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw std::invalid_argument("mean_ci: need at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("mean_ci: level must lie in (0, 1)");
  MeanCI ci;
  ci.mean = sample_mean(samples);
  ci.std_error = std::sqrt(sample_variance(samples) / static_cast<double>(samples.size()));
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  ci.half_width = z * ci.std_error;
  return ci;
}

namespace {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace

TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double threshold) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double rn = std::sqrt(n);
  TestReport r;
  r.name = "ks";
  r.statistic = d;
  r.p_value = kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
  r.threshold = threshold;
  r.pass = r.p_value > threshold;
  r.metadata["n"] = n;
  return r;
}

TestReport ks_normal(std::span<const double> samples, double threshold) {
  if (samples.size() < 50) throw std::invalid_argument("ks_normal: need at least 50 samples");
  const double m = sample_mean(samples);
  const double v = sample_variance(samples);
  if (!(v > 0.0)) throw std::invalid_argument("ks_normal: degenerate variance");
  const boost::math::normal dist(m, std::sqrt(v));
  TestReport r = ks_test(samples, [&](double x) { return boost::math::cdf(dist, x); }, threshold);
  r.name = "ks_normal";
  r.metadata["mean"] = m;
  r.metadata["variance"] = v;
  return r;
}

MomentZ moment_z(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("moment_z: need at least 100 samples");
  const double n = static_cast<double>(samples.size());
  const double m = sample_mean(samples);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw std::invalid_argument("moment_z: degenerate variance");
  MomentZ z;
  const double g1 = m3 / std::pow(m2, 1.5);
  const double b2 = m4 / (m2 * m2);
  z.skewness = g1;
  z.excess_kurtosis = b2 - 3.0;
  const double var_g1 = 6.0 * (n - 2.0) / ((n + 1.0) * (n + 3.0));
  const double mean_b2 = 3.0 * (n - 1.0) / (n + 1.0);
  const double var_b2 =
      24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
  z.skew_z = g1 / std::sqrt(var_g1);
  z.kurt_z = (b2 - mean_b2) / std::sqrt(var_b2);
  return z;
}

Slope loglog_slope(std::span<const double> h, std::span<const double> v) {
  if (h.size() != v.size()) throw std::invalid_argument("loglog_slope: length mismatch");
  if (h.size() < 4) throw std::invalid_argument("loglog_slope: need at least 4 pairs");
  const std::size_t n = h.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(v[i] > 0.0))
      throw std::invalid_argument("loglog_slope: inputs must be positive");
    x[i] = std::log(h[i]);
    y[i] = std::log(v[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Slope s;
  s.slope = sxy / sxx;
  s.intercept = my - s.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - s.intercept - s.slope * x[i];
    rss += e * e;
  }
  s.std_error = std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx);
  return s;
}

TestReport chi_square_uniform(std::span<const std::uint64_t> counts, double threshold) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: need at least 2 cells");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (!(total > 0.0)) throw std::invalid_argument("chi_square_uniform: no observations");
  const double expected = total / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  TestReport r;
  r.name = "chi_square_uniform";
  r.statistic = chi2;
  r.p_value = boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
  r.threshold = threshold;
  r.pass = r.p_value > threshold;
  r.metadata["dof"] = dof;
  return r;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw std::invalid_argument("sample_covariance: need at least 2 rows");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows() - 1);
}

Eigen::MatrixXd bootstrap_covariance_se(const Eigen::MatrixXd& data, int resamples,
                                        std::uint64_t seed) {
  if (resamples < 2) throw std::invalid_argument("bootstrap_covariance_se: need >= 2 resamples");
  const auto n = data.rows();
  const auto k = data.cols();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd boot(n, k);
  for (int b = 0; b < resamples; ++b) {
    UniformStream u({seed, static_cast<std::uint32_t>(b), 0, Purpose::kBootstrap});
    for (Eigen::Index i = 0; i < n; ++i) {
      auto idx = static_cast<Eigen::Index>(u.next() * static_cast<double>(n));
      boot.row(i) = data.row(std::min(idx, n - 1));
    }
    const Eigen::MatrixXd c = sample_covariance(boot);
    sum += c;
    sum_sq += c.cwiseProduct(c);
  }
  const double r = resamples;
  Eigen::MatrixXd var = (sum_sq - sum.cwiseProduct(sum) / r) / (r - 1.0);
  return var.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace robinfluct
