#include "robinfluct/fluctuation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "robinfluct/rng.hpp"

namespace robinfluct {

std::vector<FieldSample> compute_field(const std::vector<ReplicaResult>& runs,
                                       const std::vector<std::string>& labels,
                                       std::size_t particles, const std::vector<double>& times,
                                       const std::vector<std::vector<double>>& centering) {
  if (centering.size() != times.size())
    throw std::invalid_argument("compute_field: centering and time grid differ in length");
  const double root_n = std::sqrt(static_cast<double>(particles));
  std::vector<FieldSample> out;
  out.reserve(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const ReplicaResult& run = runs[r];
    if (run.times.size() != times.size())
      throw std::invalid_argument("compute_field: replica time grid does not match centering");
    FieldSample f;
    f.replica = static_cast<std::uint32_t>(r);
    f.times = times;
    f.labels = labels;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (std::abs(run.times[i] - times[i]) > 1e-12 * std::max(1.0, times[i]))
        throw std::invalid_argument("compute_field: replica time grid does not match centering");
      if (run.pairings[i].size() != labels.size() || centering[i].size() != labels.size())
        throw std::invalid_argument("compute_field: observable count mismatch");
      std::vector<double> row(labels.size());
      for (std::size_t k = 0; k < labels.size(); ++k)
        row[k] = root_n * (run.pairings[i][k] - centering[i][k]);
      f.values.push_back(std::move(row));
    }
    out.push_back(std::move(f));
  }
  return out;
}

void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples) {
  out << "replica,t,observable_id,value\n" << std::setprecision(17);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < s.times.size(); ++i)
      for (std::size_t k = 0; k < s.labels.size(); ++k)
        out << s.replica << ',' << s.times[i] << ',' << s.labels[k] << ',' << s.values[i][k]
            << '\n';
}

Eigen::MatrixXd initial_covariance(std::span<const GridFunction> fs, const GridFunction& u0) {
  const auto n = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXd c(n, n);
  std::vector<double> mean(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) mean[i] = fs[i].inner(u0);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i; j < fs.size(); ++j) {
      GridFunction prod = fs[i];
      for (std::size_t k = 0; k < prod.size(); ++k) prod[k] *= fs[j][k];
      const double v = prod.inner(u0) - mean[i] * mean[j];
      c(i, j) = c(j, i) = v;
    }
  }
  return c;
}

namespace {

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov, const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.size() && ev.minCoeff() < -1e-8)
    throw std::runtime_error(std::string(who) + ": covariance is not positive semidefinite");
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(0.0, ev[i]));
  return es.eigenvectors() * ev.asDiagonal();
}

std::size_t grid_index(const TimeSeries& u_path, double t) {
  if (u_path.times.empty()) throw std::invalid_argument("covariance: empty density path");
  if (t == 0.0) return 0;
  if (u_path.times.size() < 2) throw std::invalid_argument("covariance: density path too short");
  const double h = u_path.times[1] - u_path.times[0];
  const auto n = static_cast<std::size_t>(std::llround(t / h));
  if (n >= u_path.times.size() || std::abs(u_path.times[n] - t) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("covariance: time " + std::to_string(t) +
                                " is not on the PDE step grid");
  return n;
}

// Backward path of f from t, checked against the forward grid.
TimeSeries aligned_path(const GridFunction& f, double t, const TimeSeries& u_path,
                        const KillingRate& q, double c, const PdeOptions& opt) {
  const std::size_t n = grid_index(u_path, t);
  TimeSeries path = solve_backward_Q_path(f, t, q, c, opt);
  if (path.times.size() != n + 1)
    throw std::invalid_argument("covariance: backward and forward PDE grids differ");
  return path;
}

}  // namespace

Eigen::MatrixXd sample_Y0(std::span<const GridFunction> fs, const GridFunction& u0,
                          std::uint64_t seed, std::size_t count) {
  const Eigen::MatrixXd factor = psd_factor(initial_covariance(fs, u0), "sample_Y0");
  const auto k = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), k);
  const StreamId id{seed, 0, 0, Purpose::kGaussian};
  Eigen::VectorXd z(k);
  for (std::size_t r = 0; r < count; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) z[i] = normal_at(id, r * fs.size() + i);
    out.row(static_cast<Eigen::Index>(r)) = (factor * z).transpose();
  }
  return out;
}

double covariance_M(const GridFunction& phi, const GridFunction& psi, double t,
                    const TimeSeries& u_path, const KillingRate& q, double c) {
  if (t < 0.0) throw std::invalid_argument("covariance_M: t must be >= 0");
  const std::size_t n = grid_index(u_path, t);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 <= n; ++k) {
    const double h = u_path.times[k + 1] - u_path.times[k];
    const double a = dirichlet_form_q(phi, psi, u_path.snapshots[k], q, u_path.times[k], c);
    const double b =
        dirichlet_form_q(phi, psi, u_path.snapshots[k + 1], q, u_path.times[k + 1], c);
    total += 0.5 * h * (a + b);
  }
  return total;
}

CovarianceSlice covariance_Y(std::span<const GridFunction> fs, double t, const TimeSeries& u_path,
                             const KillingRate& q, double c, const PdeOptions& opt) {
  const std::size_t n = grid_index(u_path, t);
  const std::size_t m = fs.size();
  std::vector<TimeSeries> paths;
  paths.reserve(m);
  for (const auto& f : fs) paths.push_back(aligned_path(f, t, u_path, q, c, opt));

  CovarianceSlice out;
  out.t = t;
  std::vector<GridFunction> start;
  for (const auto& p : paths) start.push_back(p.snapshots.front());
  out.initial = initial_covariance(start, u_path.snapshots.front());

  const auto mi = static_cast<Eigen::Index>(m);
  std::vector<Eigen::MatrixXd> d(n + 1, Eigen::MatrixXd::Zero(mi, mi));
  for (std::size_t k = 0; k <= n; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        const double v = dirichlet_form_q(paths[i].snapshots[k], paths[j].snapshots[k],
                                          u_path.snapshots[k], q, u_path.times[k], c);
        d[k](i, j) = d[k](j, i) = v;
      }
  out.martingale = Eigen::MatrixXd::Zero(mi, mi);
  for (std::size_t k = 0; k < n; ++k)
    out.martingale += 0.5 * (u_path.times[k + 1] - u_path.times[k]) * (d[k] + d[k + 1]);
  if (n >= 2 && n % 2 == 0) {
    Eigen::MatrixXd coarse = Eigen::MatrixXd::Zero(mi, mi);
    for (std::size_t k = 0; k < n; k += 2)
      coarse += 0.5 * (u_path.times[k + 2] - u_path.times[k]) * (d[k] + d[k + 2]);
    out.quadrature_error = (out.martingale - coarse).cwiseAbs().maxCoeff() / 3.0;
  }
  out.total = out.initial + out.martingale;
  return out;
}

Eigen::MatrixXd cross_covariance(std::span<const GridFunction> fs, double s, double t,
                                 const TimeSeries& u_path, const KillingRate& q, double c,
                                 const PdeOptions& opt) {
  if (s > t) throw std::invalid_argument("cross_covariance: requires s <= t");
  std::vector<GridFunction> all(fs.begin(), fs.end());
  for (const auto& f : fs) all.push_back(solve_backward_Q(f, s, t, q, c, opt));
  const CovarianceSlice slice = covariance_Y(all, s, u_path, q, c, opt);
  const auto m = static_cast<Eigen::Index>(fs.size());
  return slice.total.block(0, m, m, m);
}

CovarianceModel build_covariance_model(const std::vector<std::string>& labels,
                                       std::span<const GridFunction> fs,
                                       const std::vector<double>& times, const TimeSeries& u_path,
                                       const KillingRate& q, double c, const PdeOptions& opt) {
  if (labels.size() != fs.size())
    throw std::invalid_argument("build_covariance_model: label count mismatch");
  CovarianceModel model;
  model.labels = labels;
  model.times = times;
  model.initial = initial_covariance(fs, u_path.snapshots.front());
  for (double t : times) {
    CovarianceSlice s = covariance_Y(fs, t, u_path, q, c, opt);
    model.martingale.push_back(std::move(s.martingale));
    model.total.push_back(std::move(s.total));
    model.quadrature_error.push_back(s.quadrature_error);
  }
  return model;
}

OuPlan prepare_ou(const GridFunction& phi, const std::vector<double>& times,
                  const TimeSeries& u_path, const KillingRate& q, double c,
                  const PdeOptions& opt) {
  if (times.empty()) throw std::invalid_argument("prepare_ou: empty time grid");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1])) throw std::invalid_argument("prepare_ou: times must increase");
  OuPlan plan;
  plan.times = times;
  const std::size_t cells = grid_index(u_path, times.back());
  plan.cell = cells ? u_path.times[1] - u_path.times[0] : 0.0;
  const auto m = static_cast<Eigen::Index>(times.size());
  plan.noise_coeff = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(cells));
  std::vector<GridFunction> start;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = times[j];
    const TimeSeries path = aligned_path(phi, t, u_path, q, c, opt);
    const std::size_t n = path.times.size() - 1;
    std::vector<double> d(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
      d[k] = dirichlet_form_q(path.snapshots[k], path.snapshots[k], u_path.snapshots[k], q,
                              u_path.times[k], c);
    for (std::size_t k = 0; k < n; ++k) {
      double avg = 0.5 * (d[k] + d[k + 1]);
      if (avg < -1e-10) ++plan.clipped;
      plan.noise_coeff(j, static_cast<Eigen::Index>(k)) = std::sqrt(std::max(0.0, avg));
    }
    start.push_back(path.snapshots.front());
  }
  if (plan.clipped)
    std::cerr << "warning: prepare_ou clipped " << plan.clipped
              << " negative quadrature variances\n";
  const Eigen::MatrixXd c0 = initial_covariance(start, u_path.snapshots.front());
  plan.initial_factor = psd_factor(c0, "prepare_ou");
  for (Eigen::Index j = 0; j < m; ++j)
    plan.marginal_variance.push_back(c0(j, j) + plan.cell * plan.noise_coeff.row(j).squaredNorm());
  return plan;
}

std::vector<double> simulate_OU_path(const OuPlan& plan, std::uint64_t seed, std::uint32_t path) {
  const auto m = plan.initial_factor.rows();
  const auto cells = plan.noise_coeff.cols();
  const StreamId y0{seed, path, 0, Purpose::kGaussian};
  const StreamId db{seed, path, 1, Purpose::kGaussian};
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = normal_at(y0, static_cast<std::uint64_t>(i));
  Eigen::VectorXd dB(cells);
  const double root_h = std::sqrt(plan.cell);
  for (Eigen::Index k = 0; k < cells; ++k)
    dB[k] = root_h * normal_at(db, static_cast<std::uint64_t>(k));
  const Eigen::VectorXd y = plan.initial_factor * z + plan.noise_coeff * dB;
  return std::vector<double>(y.data(), y.data() + y.size());
}

double field_h_norm(std::span<const double> values, double alpha,
                    std::span<const EigenMode> modes) {
  return h_minus_alpha_norm(values, alpha, modes);
}

}  // namespace robinfluct
