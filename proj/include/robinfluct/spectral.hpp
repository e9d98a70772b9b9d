#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "robinfluct/geometry.hpp"

namespace robinfluct {

/// Neumann eigenpair of A = (c/2) Laplacian on a box:
///   phi_m(x) = norm_const * prod_i cos(m_i pi (x_i - lo_i) / L_i),
///   lambda_m = (c/2) pi^2 sum_i (m_i / L_i)^2,  A phi_m = -lambda_m phi_m.
struct EigenMode {
  std::array<int, kMaxDim> multi_index{};
  double eigenvalue = 0.0;
  double norm_const = 0.0;

  std::string label(int dim) const;
};

/// Builds the mode for a given multi-index (unit L2(D) norm).
EigenMode make_mode(const BoxDomain& dom, double c, std::span<const int> multi_index);

/// The K smallest eigenvalues with multiplicity, ascending, ties broken
/// lexicographically on the multi-index.
std::vector<EigenMode> enumerate_modes(const BoxDomain& dom, double c, int count);

/// Every mode with eigenvalue <= bound, in enumerate_modes order.
std::vector<EigenMode> modes_below(const BoxDomain& dom, double c, double bound);

/// Throws DomainError for x outside closure(D).
double eval_eigenfunction(const BoxDomain& dom, const EigenMode& mode, const Point& x);
double eval_eigenfunction_unchecked(const BoxDomain& dom, const EigenMode& mode,
                                    const Point& x);
Point eigenfunction_gradient(const BoxDomain& dom, const EigenMode& mode, const Point& x);
/// sup-norm over closure(D): norm_const (attained at the corner lo).
double eigenfunction_sup_norm(const EigenMode& mode);
/// Exact boundary trace integral of phi^2 against the surface measure.
double eigenfunction_boundary_trace(const BoxDomain& dom, const EigenMode& mode);

/// Coefficients in the first K modes, in enumerate_modes order.
struct SpectralCoeffs {
  std::vector<double> coeffs;
  std::size_t cutoff() const { return coeffs.size(); }
};

/// <a, b>_alpha = sum_k (1 + lambda_k)^alpha a_k b_k. Throws on mismatched
/// cutoffs or when there are fewer modes than coefficients.
double h_alpha_inner(const SpectralCoeffs& a, const SpectralCoeffs& b, double alpha,
                     std::span<const EigenMode> modes);

/// Truncated squared H_{-alpha} norm from dual pairings <mu, phi_k>.
double h_minus_alpha_norm(std::span<const double> pairings, double alpha,
                          std::span<const EigenMode> modes);

/// #{k : lambda_k <= x}, counted exactly by lattice enumeration.
long long eigenvalue_count(const BoxDomain& dom, double c, double x);

/// eigenvalue_count(x) / x^{d/2}. Requires at least `min_count` modes below x.
double weyl_ratio(const BoxDomain& dom, double c, double x_max, long long min_count = 100);

/// Leading Weyl constant omega_d |D| (2/c)^{d/2} / (2 pi)^d.
double weyl_constant(const BoxDomain& dom, double c);

struct EigenBoundsReport {
  std::vector<double> sup_norms;
  std::vector<double> boundary_traces;
  /// smallest C with ||phi_k|| <= C lambda_k^{d/4} over nonconstant modes
  double sup_constant = 0.0;
  /// smallest C with int phi_k^2 dsigma <= C (lambda_k + 1)
  double trace_constant = 0.0;
  /// max_k ||phi_k|| against the box bound 2^{d/2} / sqrt(|D|)
  double uniform_sup = 0.0;
  double uniform_bound = 0.0;
  bool uniform_bound_holds = false;
};

EigenBoundsReport eigenfunction_bounds_check(const BoxDomain& dom,
                                             std::span<const EigenMode> modes);

/// CSV with columns index,multi_index,lambda,sup_norm.
void write_modes_csv(std::ostream& out, const BoxDomain& dom, std::span<const EigenMode> modes);

}  // namespace robinfluct
