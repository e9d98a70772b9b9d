#include "robinfluct/pde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "robinfluct/quadrature.hpp"

namespace robinfluct {

using std::numbers::pi;

double robin_flux_coefficient(double q, double c) { return 2.0 * q / c; }

void PdeOptions::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("pde: dt_pde must be positive");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("pde: theta must lie in [0.5, 1]");
  if (rannacher_steps < 0) throw std::invalid_argument("pde: rannacher_steps must be >= 0");
  if (record_every == 0) throw std::invalid_argument("pde: record_every must be >= 1");
}

const GridFunction& TimeSeries::at(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return snapshots[k];
  throw std::out_of_range("TimeSeries: time not on the record grid");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

enum class Potential { kRobin, kStrip };

// W du/dt = -(K + diag(pot(t))) u, with K the Neumann stiffness of (c/2) Laplacian.
class Stepper {
 public:
  Stepper(const GridFunction& like, const KillingRate& q, double c, Potential kind, double scale,
          double delta)
      : q_(q), kind_(kind), scale_(scale), delta_(delta) {
    const std::size_t n = like.size();
    const int d = like.dim();
    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) nodes_[i] = like.node(i);
    const auto w = like.trapezoid_weights();
    mass_ = Eigen::Map<const Vec>(w.data(), static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < n; ++i) {
      trip.emplace_back(i, i, 0.0);
      const auto m = like.multi_index(i);
      for (int a = 0; a < d; ++a) {
        if (m[a] == like.nodes(a) - 1) continue;
        const std::size_t j = i + like.stride(a);
        double e = 0.5 * c / like.spacing(a);
        for (int b = 0; b < d; ++b) {
          if (b == a) continue;
          const bool end = m[b] == 0 || m[b] == like.nodes(b) - 1;
          e *= end ? 0.5 * like.spacing(b) : like.spacing(b);
        }
        trip.emplace_back(i, i, e);
        trip.emplace_back(j, j, e);
        trip.emplace_back(i, j, -e);
        trip.emplace_back(j, i, -e);
      }
    }
    stiffness_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    stiffness_.setFromTriplets(trip.begin(), trip.end());
    stiffness_.makeCompressed();
    system_ = stiffness_;
    diag_pos_.resize(n);
    for (Eigen::Index col = 0; col < stiffness_.outerSize(); ++col)
      for (auto k = stiffness_.outerIndexPtr()[col]; k < stiffness_.outerIndexPtr()[col + 1]; ++k)
        if (stiffness_.innerIndexPtr()[k] == col) diag_pos_[col] = k;
    solver_.analyzePattern(system_);

    if (kind == Potential::kRobin) {
      const auto sw = like.surface_weights();
      weight_ = Eigen::Map<const Vec>(sw.data(), static_cast<Eigen::Index>(n));
      // (c/2) beta sigma_w with beta from the Robin coefficient
      for (std::size_t i = 0; i < n; ++i) weight_[i] *= 0.5 * c * robin_flux_coefficient(1.0, c);
    } else {
      weight_.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i)
        weight_[i] = w[i] * strip_fraction(like, i, delta) / delta;
    }
    pot_.setZero(static_cast<Eigen::Index>(n));
  }

  // Fraction of node i's control volume inside {dist(x, dD) < delta}.
  static double strip_fraction(const GridFunction& g, std::size_t i, double delta) {
    const Point x = g.node(i);
    const BoxDomain& dom = g.domain();
    double inner = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double h = g.spacing(a);
      const double lo = std::max(dom.lo(a), x[a] - 0.5 * h);
      const double hi = std::min(dom.hi(a), x[a] + 0.5 * h);
      const double ilo = std::max(lo, dom.lo(a) + delta);
      const double ihi = std::min(hi, dom.hi(a) - delta);
      inner *= std::max(0.0, ihi - ilo) / (hi - lo);
    }
    return 1.0 - inner;
  }

  // One step of length h with operator frozen at time t_mid: x <- M^{-1} R x.
  void step(Vec& x, double h, double t_mid, double theta) {
    update_potential(t_mid);
    if (!factored_ || theta != theta_ || h != h_ || pot_changed_) {
      const double* kv = stiffness_.valuePtr();
      double* sv = system_.valuePtr();
      for (Eigen::Index k = 0; k < stiffness_.nonZeros(); ++k) sv[k] = theta * h * kv[k];
      for (Eigen::Index i = 0; i < mass_.size(); ++i)
        sv[diag_pos_[i]] += mass_[i] + theta * h * pot_[i];
      solver_.factorize(system_);
      if (solver_.info() != Eigen::Success) throw std::runtime_error("pde: factorization failed");
      factored_ = true;
      theta_ = theta;
      h_ = h;
      pot_changed_ = false;
    }
    Vec rhs = mass_.cwiseProduct(x);
    if (theta < 1.0) rhs -= (1.0 - theta) * h * (stiffness_ * x + pot_.cwiseProduct(x));
    x = solver_.solve(rhs);
  }

 private:
  void update_potential(double t) {
    if (have_pot_ && q_.is_time_homogeneous()) return;
    Vec next(pot_.size());
    for (Eigen::Index i = 0; i < pot_.size(); ++i)
      next[i] = weight_[i] == 0.0 ? 0.0 : scale_ * weight_[i] * q_(t, nodes_[i]);
    if (!have_pot_ || next != pot_) {
      pot_ = next;
      pot_changed_ = true;
    }
    have_pot_ = true;
  }

  KillingRate q_;
  Potential kind_;
  double scale_;
  double delta_;
  std::vector<Point> nodes_;
  Vec mass_;
  Vec weight_;
  Vec pot_;
  SpMat stiffness_;
  SpMat system_;
  std::vector<Eigen::Index> diag_pos_;
  Eigen::SimplicialLDLT<SpMat> solver_;
  bool factored_ = false;
  bool have_pot_ = false;
  bool pot_changed_ = true;
  double theta_ = -1.0;
  double h_ = -1.0;
};

Vec to_vec(const GridFunction& g) {
  return Eigen::Map<const Vec>(g.values().data(), static_cast<Eigen::Index>(g.size()));
}

void from_vec(const Vec& v, GridFunction& g) {
  std::copy(v.data(), v.data() + v.size(), g.values().begin());
}

std::size_t step_count(double length, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / dt - 1e-9)));
}

void check_q(const KillingRate& q) {
  if (q.is_constant() ? q.constant_value() < 0.0 : false)
    throw std::invalid_argument("pde: killing rate must be nonnegative");
}

// Backward sweep from t down to s; calls sink(n, v) after producing v(s_n),
// n counting down from steps to 0.
template <typename Sink>
void backward_sweep(const GridFunction& phi, double s, double t, const KillingRate& q, double c,
                    const PdeOptions& opt, Potential kind, double delta, Sink&& sink) {
  opt.validate();
  if (s > t) throw std::invalid_argument("pde: backward solve requires s <= t");
  check_q(q);
  const std::size_t steps = s == t ? 0 : step_count(t - s, opt.dt);
  Vec v = to_vec(phi);
  sink(steps, v);
  if (steps == 0) return;
  const double h = (t - s) / static_cast<double>(steps);
  Stepper stepper(phi, q, c, kind, 1.0, delta);
  for (std::size_t j = 0; j < steps; ++j) {
    const double hi = t - static_cast<double>(j) * h;
    const double theta = static_cast<int>(j) < opt.rannacher_steps ? 1.0 : opt.theta;
    stepper.step(v, h, hi - 0.5 * h, theta);
    sink(steps - j - 1, v);
  }
}

}  // namespace

TimeSeries solve_forward(const GridFunction& u0, const KillingRate& q, double c, double horizon,
                         const PdeOptions& opt) {
  opt.validate();
  if (!(horizon >= 0.0)) throw std::invalid_argument("pde: horizon must be nonnegative");
  if (!(c > 0.0)) throw std::invalid_argument("pde: c must be positive");
  check_q(q);
  TimeSeries out;
  out.times.push_back(0.0);
  out.snapshots.push_back(u0);
  if (horizon == 0.0) return out;
  const std::size_t steps = step_count(horizon, opt.dt);
  const double h = horizon / static_cast<double>(steps);
  Stepper stepper(u0, q, c, Potential::kRobin, opt.robin_sign, 0.0);
  Vec u = to_vec(u0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double theta = static_cast<int>(k) < opt.rannacher_steps ? 1.0 : opt.theta;
    stepper.step(u, h, (static_cast<double>(k) + 0.5) * h, theta);
    if ((k + 1) % opt.record_every == 0 || k + 1 == steps) {
      GridFunction g = u0;
      from_vec(u, g);
      out.times.push_back(k + 1 == steps ? horizon : static_cast<double>(k + 1) * h);
      out.snapshots.push_back(std::move(g));
    }
  }
  return out;
}

GridFunction solve_backward_Q(const GridFunction& phi, double s, double t, const KillingRate& q,
                              double c, const PdeOptions& opt) {
  GridFunction out = phi;
  backward_sweep(phi, s, t, q, c, opt, Potential::kRobin, 0.0, [&](std::size_t n, const Vec& v) {
    if (n == 0) from_vec(v, out);
  });
  return out;
}

TimeSeries solve_backward_Q_path(const GridFunction& phi, double t, const KillingRate& q,
                                 double c, const PdeOptions& opt) {
  TimeSeries out;
  const std::size_t steps = t == 0.0 ? 0 : step_count(t, opt.dt);
  out.times.resize(steps + 1);
  out.snapshots.assign(steps + 1, phi);
  backward_sweep(phi, 0.0, t, q, c, opt, Potential::kRobin, 0.0,
                 [&](std::size_t n, const Vec& v) {
                   out.times[n] = steps ? t * static_cast<double>(n) / steps : 0.0;
                   from_vec(v, out.snapshots[n]);
                 });
  return out;
}

GridFunction solve_backward_QN(const GridFunction& phi, double s, double t, const KillingRate& q,
                               double delta, double c, const PdeOptions& opt) {
  if (!(delta > 0.0)) throw std::invalid_argument("pde: delta must be positive");
  GridFunction out = phi;
  backward_sweep(phi, s, t, q, c, opt, Potential::kStrip, delta, [&](std::size_t n, const Vec& v) {
    if (n == 0) from_vec(v, out);
  });
  return out;
}

// ---------------------------------------------------------------------------
// image-method kernels

namespace {

double gauss(double u, double sd) {
  return std::exp(-0.5 * u * u / (sd * sd)) / (std::sqrt(2.0 * pi) * sd);
}

// Phi(b) - Phi(a) for the standard normal CDF, without cancellation.
double normal_mass(double a, double b) {
  constexpr double r = std::numbers::sqrt2;
  if (a >= 0.0) return 0.5 * (std::erfc(a / r) - std::erfc(b / r));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / r) - std::erfc(-a / r));
  return 1.0 - 0.5 * (std::erfc(-a / r) + std::erfc(b / r));
}

// int_a^b G_sd(y - z) (alpha + beta y) dy
double linear_gauss_integral(double a, double b, double z, double sd, double alpha, double beta) {
  return (alpha + beta * z) * normal_mass((a - z) / sd, (b - z) / sd) +
         beta * sd * sd * (gauss(a - z, sd) - gauss(b - z, sd));
}

// Image centers z such that p(t, x, y) = sum G(y - z) on [lo, lo + L].
template <typename F>
void for_each_image(double x, double lo, double length, double sd, F&& f) {
  const int reach = static_cast<int>(std::ceil((10.0 * sd + length) / (2.0 * length))) + 1;
  for (int n = -reach; n <= reach; ++n) {
    f(x - 2.0 * n * length);
    f(2.0 * lo - x + 2.0 * n * length);
  }
}

// H[i][k] = int p(t, x_i, y) hat_k(y) dy on the vertex grid of one axis.
// Only rows flagged in `rows` are filled when it is nonempty.
std::vector<double> hat_matrix(int nodes, double lo, double length, double t, double c,
                               const std::vector<bool>& rows = {}) {
  std::vector<double> H(static_cast<std::size_t>(nodes) * nodes, 0.0);
  const double h = length / (nodes - 1);
  auto y = [&](int k) { return k == nodes - 1 ? lo + length : lo + k * h; };
  if (t == 0.0) {
    for (int i = 0; i < nodes; ++i) H[static_cast<std::size_t>(i) * nodes + i] = 1.0;
    return H;
  }
  const double sd = std::sqrt(c * t);
  for (int i = 0; i < nodes; ++i) {
    if (!rows.empty() && !rows[i]) continue;
    const double x = y(i);
    double* row = &H[static_cast<std::size_t>(i) * nodes];
    for_each_image(x, lo, length, sd, [&](double z) {
      // skip images whose Gaussian misses [lo, lo + L]
      if (z < lo - 12.0 * sd || z > lo + length + 12.0 * sd) return;
      const int k_lo = std::max(0, static_cast<int>(std::floor((z - 12.0 * sd - lo) / h)) - 1);
      const int k_hi =
          std::min(nodes - 1, static_cast<int>(std::ceil((z + 12.0 * sd - lo) / h)) + 1);
      for (int k = k_lo; k <= k_hi; ++k) {
        double v = 0.0;
        if (k > 0) {  // rising piece on [y_{k-1}, y_k]: (y - y_{k-1}) / h
          const double a = y(k - 1), b = y(k);
          v += linear_gauss_integral(a, b, z, sd, -a / h, 1.0 / h);
        }
        if (k < nodes - 1) {  // falling piece on [y_k, y_{k+1}]: (y_{k+1} - y) / h
          const double a = y(k), b = y(k + 1);
          v += linear_gauss_integral(a, b, z, sd, b / h, -1.0 / h);
        }
        row[k] += v;
      }
    });
  }
  return H;
}

// Applies a per-axis matrix along `axis` of the tensor grid.
void apply_axis(const std::vector<double>& H, int axis, GridFunction& g) {
  const int n = g.nodes(axis);
  const std::size_t stride = g.stride(axis);
  const std::size_t block = stride * n;
  std::vector<double> line(n), out(n);
  auto& v = g.values();
  for (std::size_t base = 0; base < v.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (int k = 0; k < n; ++k) line[k] = v[base + off + k * stride];
      for (int i = 0; i < n; ++i) {
        const double* row = &H[static_cast<std::size_t>(i) * n];
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += row[k] * line[k];
        out[i] = s;
      }
      for (int i = 0; i < n; ++i) v[base + off + i * stride] = out[i];
    }
  }
}

}  // namespace

double neumann_kernel_1d(double t, double x, double y, double lo, double length, double c) {
  if (!(t > 0.0)) throw std::invalid_argument("neumann_kernel_1d: t must be positive");
  const double sd = std::sqrt(c * t);
  double s = 0.0;
  for_each_image(x, lo, length, sd, [&](double z) { s += gauss(y - z, sd); });
  return s;
}

double heat_kernel_image(const BoxDomain& dom, double c, double t, const Point& x,
                         const Point& y) {
  double p = 1.0;
  for (int a = 0; a < dom.dim(); ++a)
    p *= neumann_kernel_1d(t, x[a], y[a], dom.lo(a), dom.side(a), c);
  return p;
}

GridFunction heat_semigroup(const GridFunction& phi, double tau, double c) {
  if (tau < 0.0) throw std::invalid_argument("heat_semigroup: tau must be >= 0");
  GridFunction out = phi;
  if (tau == 0.0) return out;
  const BoxDomain& dom = phi.domain();
  for (int a = 0; a < phi.dim(); ++a)
    apply_axis(hat_matrix(phi.nodes(a), dom.lo(a), dom.side(a), tau, c), a, out);
  return out;
}

namespace {

// P_tau phi, exact only at boundary nodes (d = 1 skips interior rows).
GridFunction heat_semigroup_boundary(const GridFunction& phi, double tau, double c) {
  if (phi.dim() != 1 || tau == 0.0) return heat_semigroup(phi, tau, c);
  GridFunction out = phi;
  const int n = phi.nodes(0);
  std::vector<bool> rows(n, false);
  rows[0] = rows[n - 1] = true;
  apply_axis(hat_matrix(n, phi.domain().lo(0), phi.domain().side(0), tau, c, rows), 0, out);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// cosine series

HeatKernelSeries HeatKernelSeries::build(const BoxDomain& dom, double c, int cutoff) {
  HeatKernelSeries k;
  k.domain = dom;
  k.c = c;
  k.modes = enumerate_modes(dom, c, cutoff);
  double ref = k.modes.back().eigenvalue;
  if (ref <= 0.0) ref = make_mode(dom, c, std::vector<int>(dom.dim(), 1)).eigenvalue;
  double lo = 2.0 / ref;
  double hi = 40.0 / ref;
  while (k.tail_bound(hi) >= 1e-10) hi *= 2.0;
  if (k.tail_bound(lo) < 1e-10) {
    k.t_min = lo;
    return k;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (k.tail_bound(mid) < 1e-10 ? hi : lo) = mid;
  }
  k.t_min = hi;
  return k;
}

double HeatKernelSeries::tail_bound(double t) const {
  const double top = modes.back().eigenvalue;
  const auto all = modes_below(domain, c, top + 40.0 / t);
  double s = 0.0;
  for (std::size_t k = modes.size(); k < all.size(); ++k)
    s += std::exp(-all[k].eigenvalue * t) * all[k].norm_const * all[k].norm_const;
  return s;
}

double heat_kernel(double t, const Point& x, const Point& y, const HeatKernelSeries& kernel) {
  if (t < kernel.t_min)
    throw std::invalid_argument("heat_kernel: t below the truncation floor t_min");
  double s = 0.0;
  for (const auto& m : kernel.modes)
    s += std::exp(-m.eigenvalue * t) * eval_eigenfunction_unchecked(kernel.domain, m, x) *
         eval_eigenfunction_unchecked(kernel.domain, m, y);
  return s;
}

// ---------------------------------------------------------------------------
// Duhamel

double duhamel_gronwall_constant(const BoxDomain& dom, const KillingRate& q, double c) {
  return q.sup() * dom.dim() * 2.0 * std::sqrt(2.0 / (pi * c));
}

namespace {

// Boundary integral operator B(theta)[target][bnode] =
//   int_dD p(theta, x_target, y) hat_bnode(y) dsigma(y).
class BoundaryKernel {
 public:
  BoundaryKernel(const GridFunction& g, double c) : g_(g), c_(c) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.on_boundary(i)) bnodes_.push_back(i);
    for (std::size_t k = 0; k < bnodes_.size(); ++k) {
      const auto m = g.multi_index(bnodes_[k]);
      for (int a = 0; a < g.dim(); ++a) {
        if (m[a] == 0) faces_.push_back({k, a, 0});
        if (m[a] == g.nodes(a) - 1) faces_.push_back({k, a, 1});
      }
    }
  }

  const std::vector<std::size_t>& bnodes() const { return bnodes_; }

  // out0 += w0 * B(theta), out1 += w1 * B(theta); targets x bnodes, row-major
  void accumulate(double theta, double w0, double w1, const std::vector<std::size_t>& targets,
                  std::vector<double>& out0, std::vector<double>& out1) const {
    const int d = g_.dim();
    const BoxDomain& dom = g_.domain();
    std::array<std::vector<double>, kMaxDim> point;  // [i * 2 + side]
    std::array<std::vector<double>, kMaxDim> hats;
    for (int a = 0; a < d; ++a) {
      const int n = g_.nodes(a);
      point[a].resize(2 * n);
      for (int i = 0; i < n; ++i) {
        const double x = i == n - 1 ? dom.hi(a) : dom.lo(a) + i * g_.spacing(a);
        point[a][2 * i] = neumann_kernel_1d(theta, x, dom.lo(a), dom.lo(a), dom.side(a), c_);
        point[a][2 * i + 1] = neumann_kernel_1d(theta, x, dom.hi(a), dom.lo(a), dom.side(a), c_);
      }
      if (d > 1) hats[a] = hat_matrix(n, dom.lo(a), dom.side(a), theta, c_);
    }
    const std::size_t nb = bnodes_.size();
    std::vector<std::array<int, kMaxDim>> bm(nb);
    for (std::size_t k = 0; k < nb; ++k) bm[k] = g_.multi_index(bnodes_[k]);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto mt = g_.multi_index(targets[t]);
      double* row0 = &out0[t * nb];
      double* row1 = &out1[t * nb];
      for (const auto& f : faces_) {
        const auto& mk = bm[f.bnode];
        double v = point[f.axis][2 * mt[f.axis] + f.side];
        for (int b = 0; b < d; ++b) {
          if (b == f.axis) continue;
          v *= hats[b][static_cast<std::size_t>(mt[b]) * g_.nodes(b) + mk[b]];
        }
        row0[f.bnode] += w0 * v;
        row1[f.bnode] += w1 * v;
      }
    }
  }

  // Time-cell operators for lag r >= 1 on cells of width h:
  //   a0 weights g at the earlier time node, a1 at the later one.
  void cell_operators(int r, double h, int quad, const std::vector<std::size_t>& targets,
                      std::vector<double>& a0, std::vector<double>& a1) const {
    const std::size_t size = targets.size() * bnodes_.size();
    a0.assign(size, 0.0);
    a1.assign(size, 0.0);
    const auto& rule = gauss_legendre(quad);
    for (int k = 0; k < quad; ++k) {
      const double u01 = 0.5 * (rule.nodes[k] + 1.0);
      const double w01 = 0.5 * rule.weights[k];
      if (r == 1) {
        // theta = h u^2 removes the theta^{-1/2} endpoint singularity
        const double theta = h * u01 * u01;
        const double jac = 2.0 * h * u01 * w01;
        const double left = u01 * u01;
        accumulate(theta, jac * left, jac * (1.0 - left), targets, a0, a1);
      } else {
        const double theta = h * (r - 1 + u01);
        const double left = theta / h - (r - 1);
        accumulate(theta, h * w01 * left, h * w01 * (1.0 - left), targets, a0, a1);
      }
    }
  }

 private:
  struct FaceEntry {
    std::size_t bnode;
    int axis;
    int side;
  };
  const GridFunction& g_;
  double c_;
  std::vector<std::size_t> bnodes_;
  std::vector<FaceEntry> faces_;
};

void gemv_add(const std::vector<double>& m, std::size_t rows, std::size_t cols,
              const double* x, double scale, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = &m[i * cols];
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += row[k] * x[k];
    y[i] += scale * s;
  }
}

struct Interval {
  GridFunction value;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// One Picard solve on [t_top - tau, t_top].
Interval duhamel_interval(const GridFunction& phi, double t_top, double tau, const KillingRate& q,
                          double c, const DuhamelOptions& opt) {
  const std::size_t n = step_count(tau, opt.dt);
  const double h = tau / static_cast<double>(n);
  BoundaryKernel kernel(phi, c);
  const auto& bn = kernel.bnodes();
  const std::size_t nb = bn.size();

  std::vector<std::vector<double>> free(n + 1, std::vector<double>(nb));
  std::vector<std::vector<double>> qv(n + 1, std::vector<double>(nb));
  for (std::size_t j = 0; j <= n; ++j) {
    const GridFunction p = heat_semigroup_boundary(phi, static_cast<double>(j) * h, c);
    const double t_abs = t_top - static_cast<double>(j) * h;
    for (std::size_t k = 0; k < nb; ++k) {
      free[j][k] = p[bn[k]];
      qv[j][k] = q(t_abs, phi.node(bn[k]));
    }
  }

  std::vector<std::vector<double>> a0(n + 1), a1(n + 1);
  for (std::size_t r = 1; r <= n; ++r)
    kernel.cell_operators(static_cast<int>(r), h, opt.quad_points, bn, a0[r], a1[r]);

  std::vector<std::vector<double>> w = free, g(n + 1, std::vector<double>(nb));
  Interval out;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.picard_max; ++it) {
    for (std::size_t j = 0; j <= n; ++j)
      for (std::size_t k = 0; k < nb; ++k) g[j][k] = qv[j][k] * w[j][k];
    double change = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      std::vector<double> next = free[j];
      for (std::size_t l = 0; l < j; ++l) {
        gemv_add(a0[j - l], nb, nb, g[l].data(), -1.0, next.data());
        gemv_add(a1[j - l], nb, nb, g[l + 1].data(), -1.0, next.data());
      }
      for (std::size_t k = 0; k < nb; ++k) change = std::max(change, std::abs(next[k] - w[j][k]));
      w[j] = std::move(next);
    }
    out.iterations = it;
    out.residual = change;
    if (change <= opt.tolerance) {
      out.converged = true;
      break;
    }
    if (it > 3 && change >= previous) break;
    previous = change;
  }
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t k = 0; k < nb; ++k) g[j][k] = qv[j][k] * w[j][k];

  // interior evaluation at tau = n h
  out.value = heat_semigroup(phi, tau, c);
  std::vector<std::size_t> all(phi.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<double> b0, b1;
  for (std::size_t l = 0; l < n; ++l) {
    kernel.cell_operators(static_cast<int>(n - l), h, opt.quad_points, all, b0, b1);
    gemv_add(b0, all.size(), nb, g[l].data(), -1.0, out.value.values().data());
    gemv_add(b1, all.size(), nb, g[l + 1].data(), -1.0, out.value.values().data());
  }
  return out;
}

}  // namespace

DuhamelResult duhamel_solve(const GridFunction& phi, double s, double t, const KillingRate& q,
                            double c, const DuhamelOptions& opt) {
  if (s > t) throw std::invalid_argument("duhamel_solve: requires s <= t");
  if (!(opt.dt > 0.0) || opt.quad_points < 1 || opt.picard_max < 1)
    throw std::invalid_argument("duhamel_solve: invalid options");
  DuhamelResult res;
  res.value = phi;
  res.converged = true;
  if (s == t) return res;
  const double tau = t - s;
  const double B = duhamel_gronwall_constant(phi.domain(), q, c);
  int pieces = 1;
  while (B * std::sqrt(tau / pieces) >= 0.5) ++pieces;
  res.subintervals = pieces;
  const double len = tau / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double top = t - p * len;
    Interval iv = duhamel_interval(res.value, top, len, q, c, opt);
    res.value = std::move(iv.value);
    res.iterations += iv.iterations;
    res.residual = std::max(res.residual, iv.residual);
    if (!iv.converged) {
      res.converged = false;
      res.message = "Picard residual stopped decreasing at " + std::to_string(iv.residual);
    }
  }
  return res;
}

double dirichlet_form_q(const GridFunction& phi, const GridFunction& psi, const GridFunction& u,
                        const KillingRate& q, double s, double c) {
  if (!phi.conforms(psi) || !phi.conforms(u))
    throw std::invalid_argument("dirichlet_form_q: nonconforming grids");
  const int d = phi.dim();
  std::vector<double> terms;
  terms.reserve(phi.size() * (d + 1));
  const auto sw = phi.surface_weights();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto m = phi.multi_index(i);
    for (int a = 0; a < d; ++a) {
      if (m[a] == phi.nodes(a) - 1) continue;
      const std::size_t j = i + phi.stride(a);
      double e = c / phi.spacing(a);
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        const bool end = m[b] == 0 || m[b] == phi.nodes(b) - 1;
        e *= end ? 0.5 * phi.spacing(b) : phi.spacing(b);
      }
      terms.push_back(e * (phi[j] - phi[i]) * (psi[j] - psi[i]) * 0.5 * (u[i] + u[j]));
    }
    if (sw[i] > 0.0) terms.push_back(sw[i] * phi[i] * psi[i] * u[i] * q(s, phi.node(i)));
  }
  return pairwise_sum(terms.data(), terms.size());
}

namespace {

// F_0 = 1, F_{j+1}(x) = int_0^x (x - y)^{-1/2} F_j(y) dy with y = x sin^2(a).
double iterated(int j, double x, const QuadratureRule& rule) {
  if (j == 0) return 1.0;
  if (x == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double a = 0.25 * pi * (rule.nodes[k] + 1.0);
    const double sa = std::sin(a);
    s += rule.weights[k] * 2.0 * std::sqrt(x) * sa * iterated(j - 1, x * sa * sa, rule);
  }
  return 0.25 * pi * s;
}

}  // namespace

GammaIdentity gamma_identity_check(int k, double s) {
  if (k < 1 || k > 6) throw std::invalid_argument("gamma_identity_check: k must lie in [1, 6]");
  if (s < 0.0) throw std::invalid_argument("gamma_identity_check: s must be >= 0");
  GammaIdentity g;
  g.analytic = std::pow(pi, 0.5 * k) * std::pow(s, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
  g.numeric = iterated(k, s, gauss_legendre(16));
  return g;
}

}  // namespace robinfluct
