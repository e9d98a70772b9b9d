#include "robinfluct/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace robinfluct {

using std::numbers::pi;

std::string EigenMode::label(int dim) const {
  std::ostringstream os;
  for (int i = 0; i < dim; ++i) {
    if (i) os << ';';
    os << multi_index[i];
  }
  return os.str();
}

EigenMode make_mode(const BoxDomain& dom, double c, std::span<const int> multi_index) {
  if (static_cast<int>(multi_index.size()) != dom.dim())
    throw DomainError("make_mode: multi-index dimension mismatch");
  if (!(c > 0.0)) throw DomainError("make_mode: diffusivity must be positive");
  EigenMode mode;
  double sum = 0.0;
  double norm = 1.0 / std::sqrt(dom.volume());
  for (int i = 0; i < dom.dim(); ++i) {
    if (multi_index[i] < 0) throw DomainError("make_mode: negative multi-index");
    mode.multi_index[i] = multi_index[i];
    const double k = multi_index[i] / dom.side(i);
    sum += k * k;
    if (multi_index[i] > 0) norm *= std::numbers::sqrt2;
  }
  mode.eigenvalue = 0.5 * c * pi * pi * sum;
  mode.norm_const = norm;
  return mode;
}

namespace {

// Enumerate every multi-index with lambda <= bound, recursively over axes.
void collect(const BoxDomain& dom, double c, double bound, int axis,
             std::array<int, kMaxDim>& m, double partial, std::vector<EigenMode>& out) {
  if (axis == dom.dim()) {
    out.push_back(make_mode(dom, c, std::span<const int>(m.data(), dom.dim())));
    return;
  }
  const double pref = 0.5 * c * pi * pi;
  for (int k = 0;; ++k) {
    const double r = k / dom.side(axis);
    if (pref * (partial + r * r) > bound) break;
    m[axis] = k;
    collect(dom, c, bound, axis + 1, m, partial + r * r, out);
  }
  m[axis] = 0;
}

// `partial` is the running sum of (m_i / L_i)^2 over earlier axes, accumulated
// exactly as make_mode does so that lattice hits compare equal.
long long count_below(const BoxDomain& dom, double c, double bound, int axis, double partial) {
  const double side = dom.side(axis);
  const double pref = 0.5 * c * pi * pi;
  auto lam = [&](long long k) {
    const double r = static_cast<double>(k) / side;
    return pref * (partial + r * r);
  };
  if (lam(0) > bound) return 0;
  const double room = bound / pref - partial;
  long long k = static_cast<long long>(std::floor(side * std::sqrt(std::max(room, 0.0))));
  while (lam(k + 1) <= bound) ++k;
  while (k > 0 && lam(k) > bound) --k;
  if (axis == dom.dim() - 1) return k + 1;
  long long total = 0;
  for (long long j = 0; j <= k; ++j) {
    const double r = static_cast<double>(j) / side;
    total += count_below(dom, c, bound, axis + 1, partial + r * r);
  }
  return total;
}

}  // namespace

std::vector<EigenMode> enumerate_modes(const BoxDomain& dom, double c, int count) {
  if (count < 1) throw DomainError("enumerate_modes: count must be >= 1");
  if (!(c > 0.0)) throw DomainError("enumerate_modes: diffusivity must be positive");
  // grow the eigenvalue bound until it captures `count` modes
  double smallest_gap = 0.0;
  for (int i = 0; i < dom.dim(); ++i) {
    const double s = 0.5 * c * pi * pi / (dom.side(i) * dom.side(i));
    smallest_gap = (i == 0) ? s : std::min(smallest_gap, s);
  }
  double bound = smallest_gap;
  while (eigenvalue_count(dom, c, bound) < count) bound *= 1.5;
  std::vector<EigenMode> modes = modes_below(dom, c, bound);
  modes.resize(count);
  return modes;
}

std::vector<EigenMode> modes_below(const BoxDomain& dom, double c, double bound) {
  if (!(c > 0.0)) throw DomainError("modes_below: diffusivity must be positive");
  std::vector<EigenMode> modes;
  if (bound < 0.0) return modes;
  std::array<int, kMaxDim> m{};
  collect(dom, c, bound, 0, m, 0.0, modes);
  std::sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
    return a.multi_index < b.multi_index;
  });
  return modes;
}

double eval_eigenfunction_unchecked(const BoxDomain& dom, const EigenMode& mode,
                                    const Point& x) {
  double v = mode.norm_const;
  for (int i = 0; i < dom.dim(); ++i) {
    if (mode.multi_index[i] == 0) continue;
    v *= std::cos(mode.multi_index[i] * pi * (x[i] - dom.lo(i)) / dom.side(i));
  }
  return v;
}

double eval_eigenfunction(const BoxDomain& dom, const EigenMode& mode, const Point& x) {
  if (!dom.contains(x, 1e-12)) throw DomainError("eval_eigenfunction: point outside closure(D)");
  return eval_eigenfunction_unchecked(dom, mode, x);
}

Point eigenfunction_gradient(const BoxDomain& dom, const EigenMode& mode, const Point& x) {
  Point g{};
  std::array<double, kMaxDim> cosv{};
  std::array<double, kMaxDim> dsin{};
  for (int i = 0; i < dom.dim(); ++i) {
    const double k = mode.multi_index[i] * pi / dom.side(i);
    const double arg = k * (x[i] - dom.lo(i));
    cosv[i] = std::cos(arg);
    dsin[i] = -k * std::sin(arg);
  }
  for (int i = 0; i < dom.dim(); ++i) {
    double v = mode.norm_const * dsin[i];
    for (int j = 0; j < dom.dim(); ++j)
      if (j != i) v *= cosv[j];
    g[i] = v;
  }
  return g;
}

double eigenfunction_sup_norm(const EigenMode& mode) { return mode.norm_const; }

double eigenfunction_boundary_trace(const BoxDomain& dom, const EigenMode& mode) {
  // phi^2 = 1 on each face in the normal factor; tangential cos^2 average 1/2
  double total = 0.0;
  for (int a = 0; a < dom.dim(); ++a) {
    double face = mode.norm_const * mode.norm_const;
    for (int b = 0; b < dom.dim(); ++b) {
      if (b == a) continue;
      face *= dom.side(b) * (mode.multi_index[b] == 0 ? 1.0 : 0.5);
    }
    total += 2.0 * face;
  }
  return total;
}

double h_alpha_inner(const SpectralCoeffs& a, const SpectralCoeffs& b, double alpha,
                     std::span<const EigenMode> modes) {
  if (a.cutoff() != b.cutoff())
    throw std::invalid_argument("h_alpha_inner: mismatched cutoffs");
  if (modes.size() < a.cutoff())
    throw std::invalid_argument("h_alpha_inner: fewer modes than coefficients");
  double s = 0.0;
  for (std::size_t k = 0; k < a.cutoff(); ++k)
    s += std::pow(1.0 + modes[k].eigenvalue, alpha) * a.coeffs[k] * b.coeffs[k];
  return s;
}

double h_minus_alpha_norm(std::span<const double> pairings, double alpha,
                          std::span<const EigenMode> modes) {
  if (alpha < 0.0) throw std::invalid_argument("h_minus_alpha_norm: alpha must be >= 0");
  if (modes.size() < pairings.size())
    throw std::invalid_argument("h_minus_alpha_norm: fewer modes than pairings");
  double s = 0.0;
  for (std::size_t k = 0; k < pairings.size(); ++k)
    s += std::pow(1.0 + modes[k].eigenvalue, -alpha) * pairings[k] * pairings[k];
  return s;
}

long long eigenvalue_count(const BoxDomain& dom, double c, double x) {
  if (x < 0.0) return 0;
  return count_below(dom, c, x, 0, 0.0);
}

double weyl_ratio(const BoxDomain& dom, double c, double x_max, long long min_count) {
  const long long n = eigenvalue_count(dom, c, x_max);
  if (n < min_count)
    throw std::invalid_argument("weyl_ratio: fewer than " + std::to_string(min_count) +
                                " modes below x_max");
  return static_cast<double>(n) / std::pow(x_max, 0.5 * dom.dim());
}

double weyl_constant(const BoxDomain& dom, double c) {
  const int d = dom.dim();
  const double omega = std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return omega * dom.volume() * std::pow(2.0 / c, 0.5 * d) / std::pow(2.0 * pi, d);
}

EigenBoundsReport eigenfunction_bounds_check(const BoxDomain& dom,
                                             std::span<const EigenMode> modes) {
  if (modes.empty()) throw std::invalid_argument("eigenfunction_bounds_check: no modes");
  EigenBoundsReport r;
  const int d = dom.dim();
  r.uniform_bound = std::pow(2.0, 0.5 * d) / std::sqrt(dom.volume());
  for (const auto& m : modes) {
    const double sup = eigenfunction_sup_norm(m);
    const double trace = eigenfunction_boundary_trace(dom, m);
    r.sup_norms.push_back(sup);
    r.boundary_traces.push_back(trace);
    if (m.eigenvalue > 0.0)
      r.sup_constant = std::max(r.sup_constant, sup / std::pow(m.eigenvalue, 0.25 * d));
    r.trace_constant = std::max(r.trace_constant, trace / (m.eigenvalue + 1.0));
    r.uniform_sup = std::max(r.uniform_sup, sup);
  }
  r.uniform_bound_holds = r.uniform_sup <= r.uniform_bound * (1.0 + 1e-12);
  return r;
}

void write_modes_csv(std::ostream& out, const BoxDomain& dom, std::span<const EigenMode> modes) {
  out << "index,multi_index,lambda,sup_norm\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out << k << ',' << modes[k].label(dom.dim()) << ',' << modes[k].eigenvalue << ','
        << eigenfunction_sup_norm(modes[k]) << '\n';
  }
}

}  // namespace robinfluct
