#pragma once

#include <string>
#include <vector>

#include "robinfluct/geometry.hpp"
#include "robinfluct/grid.hpp"
#include "robinfluct/killing.hpp"
#include "robinfluct/spectral.hpp"

namespace robinfluct {

/// Robin coefficient beta in dn_in u = beta u on dD, for generator
/// A = (c/2) Laplacian and a boundary killing with Revuz measure q dsigma.
/// The flux form is (c/2) dn_in u = q u, so beta = 2 q / c; the assembled
/// boundary term is (c/2) beta sigma_w = q sigma_w per face node. This is
/// the only place the c scaling of the conormal enters.
double robin_flux_coefficient(double q, double c);

struct PdeOptions {
  /// target time step; the actual step divides the interval evenly
  double dt = 1e-4;
  /// 0.5 is Crank-Nicolson, 1 is implicit Euler
  double theta = 0.5;
  /// leading implicit Euler steps to damp incompatible data
  int rannacher_steps = 2;
  /// record every this many steps (the final time is always recorded)
  std::size_t record_every = 1;
  /// multiplies the Robin term of the forward solve; -1 is the sign-flip
  /// negative control
  double robin_sign = 1.0;

  void validate() const;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<GridFunction> snapshots;

  /// Snapshot at a recorded time (exact match up to 1e-9 relative).
  const GridFunction& at(double t) const;
};

/// Forward Robin heat equation du/dt = A u, (c/2) dn_in u = q u, u(0) = u0.
TimeSeries solve_forward(const GridFunction& u0, const KillingRate& q, double c, double horizon,
                         const PdeOptions& opt = {});

/// v(s) = Q_{s,t} phi: dv/ds = -A v with the Robin condition, v(t) = phi.
GridFunction solve_backward_Q(const GridFunction& phi, double s, double t, const KillingRate& q,
                              double c, const PdeOptions& opt = {});

/// Q_{s_n,t} phi at every grid time s_n = n t / steps, n = 0..steps, in
/// ascending s. record_every is ignored.
TimeSeries solve_backward_Q_path(const GridFunction& phi, double t, const KillingRate& q,
                                 double c, const PdeOptions& opt = {});

/// Q^N_{s,t} phi: dv/ds = -A v + q_N v, Neumann boundary,
/// q_N = q 1_{dist < delta} / delta averaged over each node's control volume.
GridFunction solve_backward_QN(const GridFunction& phi, double s, double t, const KillingRate& q,
                               double delta, double c, const PdeOptions& opt = {});

/// P_tau phi for the reflected (Neumann) heat semigroup, phi interpolated
/// multilinearly and integrated against the image-method kernel.
GridFunction heat_semigroup(const GridFunction& phi, double tau, double c);

/// One-dimensional Neumann kernel on [lo, lo + L] by the method of images.
double neumann_kernel_1d(double t, double x, double y, double lo, double length, double c);

/// Product of one-dimensional image kernels.
double heat_kernel_image(const BoxDomain& dom, double c, double t, const Point& x,
                         const Point& y);

/// Truncated cosine series p(t, x, y) = sum_k exp(-lambda_k t) phi_k(x) phi_k(y).
struct HeatKernelSeries {
  BoxDomain domain = BoxDomain::unit(1);
  double c = 1.0;
  std::vector<EigenMode> modes;
  /// smallest t at which the neglected tail is below 1e-10
  double t_min = 0.0;

  static HeatKernelSeries build(const BoxDomain& dom, double c, int cutoff);
  /// Upper bound on sum_{k > K} exp(-lambda_k t) ||phi_k||^2.
  double tail_bound(double t) const;
};

/// Throws std::invalid_argument for t < t_min.
double heat_kernel(double t, const Point& x, const Point& y, const HeatKernelSeries& kernel);

struct DuhamelOptions {
  /// time step of the boundary unknowns
  double dt = 1e-3;
  int picard_max = 200;
  double tolerance = 1e-12;
  /// Gauss-Legendre points per time cell
  int quad_points = 8;
};

struct DuhamelResult {
  GridFunction value;
  int iterations = 0;
  int subintervals = 0;
  double residual = 0.0;
  bool converged = false;
  std::string message;
};

/// Gronwall constant B with sup_x int_0^tau int_dD p q dsigma dtheta <= B sqrt(tau).
double duhamel_gronwall_constant(const BoxDomain& dom, const KillingRate& q, double c);

/// Solves v(s) = P_{t-s} phi - int_0^{t-s} P^dD_theta(q v)(s + theta) dtheta
/// by Picard iteration on the boundary trace, splitting [s, t] into
/// subintervals with B sqrt(length) < 1/2.
DuhamelResult duhamel_solve(const GridFunction& phi, double s, double t, const KillingRate& q,
                            double c, const DuhamelOptions& opt = {});

/// D^(q)_s(phi, psi) = <c grad phi . grad psi, u> + int_dD phi psi u q dsigma,
/// with edge differences weighted by the edge-average of u.
double dirichlet_form_q(const GridFunction& phi, const GridFunction& psi, const GridFunction& u,
                        const KillingRate& q, double s, double c);

struct GammaIdentity {
  double analytic = 0.0;
  double numeric = 0.0;
};

/// k-fold iterated integral of inverse square roots over the simplex of
/// [0, s] against pi^{k/2} s^{k/2} / Gamma((k + 2) / 2).
GammaIdentity gamma_identity_check(int k, double s);

}  // namespace robinfluct
