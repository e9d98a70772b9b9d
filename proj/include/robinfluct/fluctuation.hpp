#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "robinfluct/grid.hpp"
#include "robinfluct/killing.hpp"
#include "robinfluct/particles.hpp"
#include "robinfluct/pde.hpp"
#include "robinfluct/spectral.hpp"

namespace robinfluct {

/// Y^N_t(phi_k) = sqrt(N) (<X^N_t, phi_k> - mean_k(t)) for one replica.
struct FieldSample {
  std::uint32_t replica = 0;
  std::vector<double> times;
  std::vector<std::string> labels;
  /// values[r][k]
  std::vector<std::vector<double>> values;
};

/// Centers and scales replica pairings. `centering[r][k]` is the exact mean
/// <Q_{0,t_r} phi_k, u0> on the same time grid as the runs; throws on a
/// mismatched grid or shape.
std::vector<FieldSample> compute_field(const std::vector<ReplicaResult>& runs,
                                       const std::vector<std::string>& labels,
                                       std::size_t particles, const std::vector<double>& times,
                                       const std::vector<std::vector<double>>& centering);

/// CSV columns replica,t,observable_id,value.
void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples);

/// Cov_{u0}(f_i, f_j) = <f_i f_j, u0> - <f_i, u0><f_j, u0>.
Eigen::MatrixXd initial_covariance(std::span<const GridFunction> fs, const GridFunction& u0);

/// Exact Gaussian draws (count x K) with covariance initial_covariance via a
/// spectral square root. Throws when an eigenvalue is below -1e-8.
Eigen::MatrixXd sample_Y0(std::span<const GridFunction> fs, const GridFunction& u0,
                          std::uint64_t seed, std::size_t count);

/// int_0^t D^(q)_s(phi, psi) ds along the forward solution (trapezoid on the
/// recorded times up to t).
double covariance_M(const GridFunction& phi, const GridFunction& psi, double t,
                    const TimeSeries& u_path, const KillingRate& q, double c);

struct CovarianceSlice {
  double t = 0.0;
  /// C0 applied to (Q_{0,t} f_i, Q_{0,t} f_j)
  Eigen::MatrixXd initial;
  /// int_0^t D_s(Q_{s,t} f_i, Q_{s,t} f_j) ds
  Eigen::MatrixXd martingale;
  Eigen::MatrixXd total;
  /// Richardson estimate of the time-quadrature error (max entry)
  double quadrature_error = 0.0;
};

/// Same-time covariance of the limit Y_t on the test functions fs. u_path
/// must hold the forward solution at every PDE step of length opt.dt and t
/// must lie on that grid.
CovarianceSlice covariance_Y(std::span<const GridFunction> fs, double t, const TimeSeries& u_path,
                             const KillingRate& q, double c, const PdeOptions& opt);

/// Cov(Y_s(f_i), Y_t(f_j)) = Cov(Y_s(f_i), Y_s(Q_{s,t} f_j)) for s <= t.
Eigen::MatrixXd cross_covariance(std::span<const GridFunction> fs, double s, double t,
                                 const TimeSeries& u_path, const KillingRate& q, double c,
                                 const PdeOptions& opt);

struct CovarianceModel {
  std::vector<std::string> labels;
  std::vector<double> times;
  Eigen::MatrixXd initial;
  std::vector<Eigen::MatrixXd> martingale;
  std::vector<Eigen::MatrixXd> total;
  std::vector<double> quadrature_error;
};

CovarianceModel build_covariance_model(const std::vector<std::string>& labels,
                                       std::span<const GridFunction> fs,
                                       const std::vector<double>& times, const TimeSeries& u_path,
                                       const KillingRate& q, double c, const PdeOptions& opt);

/// Precomputed coefficients realizing the OU marginals on a time grid with a
/// shared Brownian driver on the PDE cells.
struct OuPlan {
  std::vector<double> times;
  double cell = 0.0;
  /// square root of Cov_{u0}(Q_{0,t_i} phi, Q_{0,t_j} phi)
  Eigen::MatrixXd initial_factor;
  /// coeff(j, k) = sqrt of the cell-average of D_s(Q_{s,t_j} phi) on cell k,
  /// zero for cells beyond t_j
  Eigen::MatrixXd noise_coeff;
  std::vector<double> marginal_variance;
  /// cells whose averaged D fell below -1e-10 before clipping
  std::size_t clipped = 0;
};

OuPlan prepare_ou(const GridFunction& phi, const std::vector<double>& times,
                  const TimeSeries& u_path, const KillingRate& q, double c,
                  const PdeOptions& opt);

/// One draw of (Y_{t_1}(phi), ..., Y_{t_m}(phi)); path selects the stream.
std::vector<double> simulate_OU_path(const OuPlan& plan, std::uint64_t seed, std::uint32_t path);

/// Truncated |Y|^2_{-alpha} from the values Y(phi_k) on the first K modes.
double field_h_norm(std::span<const double> values, double alpha,
                    std::span<const EigenMode> modes);

}  // namespace robinfluct
