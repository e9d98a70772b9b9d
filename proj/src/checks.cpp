#include <algorithm>
#include <cmath>
#include <sstream>

#include "robinfluct/experiments.hpp"
#include "robinfluct/quadrature.hpp"
#include "robinfluct/rng.hpp"
#include "run_support.hpp"

namespace robinfluct {

using detail::json;
using detail::num;
using detail::Setup;
using detail::verdict;

namespace {

/// Tensor composite Gauss-Legendre over the box.
double tensor_integral(const BoxDomain& dom, const std::function<double(const Point&)>& f,
                       int cells, int n) {
  const QuadratureRule& rule = gauss_legendre(n);
  const int d = dom.dim();
  std::vector<std::vector<double>> xs(d), ws(d);
  for (int a = 0; a < d; ++a) {
    const double h = dom.side(a) / cells;
    for (int c = 0; c < cells; ++c)
      for (int i = 0; i < n; ++i) {
        xs[a].push_back(dom.lo(a) + h * (c + 0.5 * (rule.nodes[i] + 1.0)));
        ws[a].push_back(0.5 * h * rule.weights[i]);
      }
  }
  const std::size_t m = xs[0].size();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= m;
  std::vector<double> terms(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point x{};
    double w = 1.0;
    std::size_t rest = flat;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t i = rest % m;
      rest /= m;
      x[a] = xs[a][i];
      w *= ws[a][i];
    }
    terms[flat] = w * f(x);
  }
  return pairwise_sum(terms.data(), terms.size());
}

int cells_for(int d) { return d == 1 ? 64 : d == 2 ? 24 : 8; }

Point relative_point(const BoxDomain& dom, double frac) {
  Point x{};
  for (int a = 0; a < dom.dim(); ++a) x[a] = dom.lo(a) + frac * dom.side(a);
  return x;
}

double l2(const GridFunction& f) { return std::sqrt(std::max(0.0, f.inner(f))); }

double sup_diff(const GridFunction& a, const GridFunction& b) { return (a - b).sup_norm(); }

// ---------------------------------------------------------------------------
// spectral

TestReport weyl_check(const BoxDomain& dom, double c, const ChecksSpec& ck, const std::string& tag) {
  const double C = weyl_constant(dom, c);
  const double d = dom.dim();
  const double x = std::pow(1.1 * static_cast<double>(ck.weyl_min_count) / C, 2.0 / d);
  const double ratio = weyl_ratio(dom, c, x, ck.weyl_min_count);
  const double rel = std::abs(ratio / C - 1.0);
  TestReport r = verdict("spectral.weyl[" + tag + "]", rel, ck.weyl_rel_tol, rel <= ck.weyl_rel_tol);
  r.metadata["ratio"] = ratio;
  r.metadata["constant"] = C;
  r.metadata["x_max"] = x;
  r.metadata["count"] = static_cast<double>(eigenvalue_count(dom, c, x));
  return r;
}

void spectral_checks(const Setup& S, SuiteResult& out) {
  const auto& ck = S.cfg.checks;
  const double c = S.cfg.c;
  out.reports.push_back(weyl_check(BoxDomain::unit(1), c, ck, "unit_interval"));
  out.reports.push_back(weyl_check(BoxDomain::unit(2), c, ck, "unit_square"));

  const EigenBoundsReport b = eigenfunction_bounds_check(S.dom, S.modes);
  TestReport br = verdict("spectral.sup_bound", b.uniform_sup, b.uniform_bound, b.uniform_bound_holds);
  br.metadata["sup_constant"] = b.sup_constant;
  br.metadata["trace_constant"] = b.trace_constant;
  out.reports.push_back(br);

  const std::size_t G = std::min<std::size_t>(S.modes.size(), 20);
  const int cells = cells_for(S.dom.dim());
  double gram = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    const EigenMode& mi = S.modes[i];
    for (std::size_t j = i; j < G; ++j) {
      const EigenMode& mj = S.modes[j];
      const double v = tensor_integral(
          S.dom,
          [&](const Point& x) {
            return eval_eigenfunction_unchecked(S.dom, mi, x) *
                   eval_eigenfunction_unchecked(S.dom, mj, x);
          },
          cells, 8);
      gram = std::max(gram, std::abs(v - (i == j ? 1.0 : 0.0)));
    }
    if (mi.eigenvalue > 0.0) {
      const double e = tensor_integral(
          S.dom,
          [&](const Point& x) {
            const Point g = eigenfunction_gradient(S.dom, mi, x);
            double s = 0.0;
            for (int a = 0; a < S.dom.dim(); ++a) s += g[a] * g[a];
            return c * s;
          },
          cells, 8);
      energy = std::max(energy, std::abs(e / (2.0 * mi.eigenvalue) - 1.0));
    }
  }
  out.reports.push_back(
      verdict("spectral.orthonormality", gram, ck.orthonormality_tol, gram <= ck.orthonormality_tol));
  out.reports.push_back(
      verdict("spectral.energy_identity", energy, ck.energy_rel_tol, energy <= ck.energy_rel_tol));

  double residual = 0.0;
  for (std::size_t i = 0; i < S.modes.size(); ++i) {
    const Observable ob = eigen_observable(S.dom, S.modes[i]);
    const double scale = (1.0 + S.modes[i].eigenvalue) * S.modes[i].norm_const;
    for (double f : {0.0, 0.137, 0.5, 0.71, 1.0}) {
      const Point x = relative_point(S.dom, f);
      residual = std::max(residual,
                          std::abs(ob.generator(x) + S.modes[i].eigenvalue * ob.value(x)) / scale);
    }
  }
  out.reports.push_back(
      verdict("spectral.eigen_residual", residual, ck.residual_tol, residual <= ck.residual_tol));

  // truncated H_{-alpha} norm of a point mass
  const int K = ck.h_alpha_cutoff;
  const int W = ck.h_alpha_window;
  const std::vector<EigenMode> modes = enumerate_modes(S.dom, c, K + W + 1);
  const Point x0 = relative_point(S.dom, 0.3);
  std::vector<double> pairings(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k)
    pairings[k] = eval_eigenfunction_unchecked(S.dom, modes[k], x0);
  auto norm = [&](int n, double alpha) {
    return h_minus_alpha_norm(std::span<const double>(pairings.data(), n), alpha,
                              std::span<const EigenMode>(modes.data(), n));
  };
  const double a_hi = S.cfg.alpha_state();
  const double a_lo = a_hi - 1.0;
  double max_inc = 0.0;
  for (int n = K; n < K + W; ++n) max_inc = std::max(max_inc, norm(n + 1, a_hi) - norm(n, a_hi));
  TestReport cauchy = verdict("spectral.h_alpha_cauchy", max_inc, ck.h_alpha_increment_tol,
                              max_inc < ck.h_alpha_increment_tol);
  cauchy.metadata["alpha"] = a_hi;
  cauchy.metadata["norm_at_cutoff"] = norm(K, a_hi);
  out.reports.push_back(cauchy);
  const double growth = norm(K + W, a_lo) - norm(K, a_lo);
  const double floor = W * ck.h_alpha_increment_tol;
  TestReport grow = verdict("spectral.h_alpha_divergent", growth, floor, growth > floor);
  grow.metadata["alpha"] = a_lo;
  out.reports.push_back(grow);
}

// ---------------------------------------------------------------------------
// geometry

void geometry_checks(const Setup& S, SuiteResult& out) {
  const auto& ck = S.cfg.checks;
  const BoxDomain& dom = S.dom;
  std::vector<double> deltas = ck.qn_deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  double formula_err = 0.0, prev = INFINITY, last = 0.0;
  bool monotone = true;
  for (double d : deltas) {
    double inner = 1.0;
    for (int a = 0; a < dom.dim(); ++a) inner *= dom.side(a) - 2.0 * d;
    const double exact = dom.volume() - inner;
    formula_err = std::max(formula_err, std::abs(dom.strip_volume(d) - exact) / exact);
    const double mink = std::abs(dom.strip_volume(d) / d - dom.surface_measure()) /
                        dom.surface_measure();
    monotone = monotone && mink <= prev + 1e-12;
    prev = mink;
    last = mink;
  }
  TestReport sv = verdict("geometry.strip_volume", last, 0.05,
                          formula_err < 1e-12 && monotone && last <= 0.05);
  sv.metadata["formula_rel_error"] = formula_err;
  out.reports.push_back(sv);

  constexpr int kBins = 64;
  for (int a = 0; a < dom.dim(); ++a) {
    std::vector<std::uint64_t> counts(kBins, 0);
    UniformStream u({S.cfg.seed, static_cast<std::uint32_t>(a), 0, Purpose::kTest});
    const double L = dom.side(a);
    for (std::size_t i = 0; i < ck.fold_samples; ++i) {
      const double x = dom.lo(a) - 4.0 * L + 10.0 * L * u.next();
      const double y = (dom.fold_axis(x, a) - dom.lo(a)) / L;
      counts[std::min(kBins - 1, static_cast<int>(y * kBins))]++;
    }
    TestReport r = chi_square_uniform(counts, ck.fold_p_threshold);
    r.name = "geometry.fold_uniform[axis=" + std::to_string(a) + "]";
    out.reports.push_back(r);
  }
}

// ---------------------------------------------------------------------------
// PDE

void pde_checks(const Setup& S, SuiteResult& out) {
  const auto& ck = S.cfg.checks;
  const double c = S.cfg.c;
  const double T = S.cfg.particles.horizon;
  std::vector<GridFunction> fs{S.constant_grid(1.0)};
  for (int k : S.cfg.observables) fs.push_back(S.mode_grid(k));

  auto duality = [&](const KillingRate& q, double sign) {
    PdeOptions fwd = S.pde;
    fwd.robin_sign = sign;
    const TimeSeries u = solve_forward(S.u0_grid, q, c, T, fwd);
    const GridFunction& uT = u.snapshots.back();
    double worst = 0.0;
    for (const auto& f : fs) {
      const double lhs = solve_backward_Q(f, 0.0, T, q, c, S.pde).inner(S.u0_grid);
      const double rhs = f.inner(uT);
      worst = std::max(worst, std::abs(lhs - rhs) / (l2(f) * l2(S.u0_grid)));
    }
    return worst;
  };
  const double dual = duality(S.q, 1.0);
  out.reports.push_back(
      verdict("pde.duality", dual, ck.duality_rel_tol, dual <= ck.duality_rel_tol));
  const KillingRate q_ctrl = S.q.is_zero() ? KillingRate::constant(1.0) : S.q;
  const double ctrl = duality(q_ctrl, -1.0);
  TestReport nc = verdict("pde.negative_control_robin_sign", ctrl, ck.duality_rel_tol,
                          ctrl > ck.duality_rel_tol);
  nc.metadata["expect"] = 1.0;
  out.reports.push_back(nc);

  const GridFunction& phi = fs.size() > 1 ? fs[1] : fs[0];
  {
    const GridFunction direct = solve_backward_Q(phi, 0.0, T, S.q, c, S.pde);
    const GridFunction half = solve_backward_Q(phi, 0.5 * T, T, S.q, c, S.pde);
    const GridFunction composed = solve_backward_Q(half, 0.0, 0.5 * T, S.q, c, S.pde);
    const double e = sup_diff(direct, composed);
    out.reports.push_back(
        verdict("pde.evolution_property", e, ck.evolution_tol, e <= ck.evolution_tol));
  }
  {
    double ratio = 0.0;
    for (const auto& f : fs)
      ratio = std::max(ratio, solve_backward_Q(f, 0.0, T, S.q, c, S.pde).sup_norm() / f.sup_norm());
    const GridFunction q1 = solve_backward_Q(fs[0], 0.0, T, S.q, c, S.pde);
    const double lo = *std::min_element(q1.values().begin(), q1.values().end());
    TestReport r = verdict("pde.contraction", ratio, 1.0, ratio <= 1.0 + 1e-12 && lo >= -1e-12);
    r.metadata["min_Q1"] = lo;
    out.reports.push_back(r);
  }
  {
    const DuhamelResult dr = duhamel_solve(phi, 0.0, ck.duhamel_span, S.q, c);
    const GridFunction cn = solve_backward_Q(phi, 0.0, ck.duhamel_span, S.q, c, S.pde);
    const double e = sup_diff(dr.value, cn);
    TestReport r = verdict("pde.cn_vs_duhamel", e, ck.duhamel_tol, dr.converged && e < ck.duhamel_tol);
    r.metadata["picard_iterations"] = dr.iterations;
    r.metadata["subintervals"] = dr.subintervals;
    r.metadata["residual"] = dr.residual;
    out.reports.push_back(r);
  }
  {
    double e = 0.0;
    const KillingRate zero = KillingRate::constant(0.0);
    for (int k : S.cfg.observables) {
      const GridFunction f = S.mode_grid(k);
      GridFunction exact = f;
      exact *= std::exp(-S.modes[static_cast<std::size_t>(k)].eigenvalue * ck.decay_horizon);
      e = std::max(e, sup_diff(solve_backward_Q(f, 0.0, ck.decay_horizon, zero, c, S.pde), exact));
    }
    out.reports.push_back(verdict("pde.eigenmode_decay", e, ck.decay_tol, e < ck.decay_tol));
  }
  {
    double e = 0.0;
    const int cells = cells_for(S.dom.dim());
    for (double t : {0.01, 0.1, 1.0})
      for (double f : {0.0, 0.37, 0.5}) {
        const Point x = relative_point(S.dom, f);
        const double m = tensor_integral(
            S.dom, [&](const Point& y) { return heat_kernel_image(S.dom, c, t, x, y); }, cells, 8);
        e = std::max(e, std::abs(m - 1.0));
      }
    out.reports.push_back(verdict("pde.kernel_mass", e, ck.kernel_tol, e <= ck.kernel_tol));
  }
  {
    const HeatKernelSeries ks = HeatKernelSeries::build(S.dom, c, S.cfg.spectral.cutoff);
    double e = 0.0;
    const std::vector<double> ts{std::max(ks.t_min, 0.02), 0.1, 0.5};
    for (double t : ts)
      for (double fx : {0.0, 0.21, 0.5})
        for (double fy : {0.0, 0.64, 1.0}) {
          const Point x = relative_point(S.dom, fx), y = relative_point(S.dom, fy);
          e = std::max(e, std::abs(heat_kernel(t, x, y, ks) - heat_kernel_image(S.dom, c, t, x, y)));
        }
    TestReport r = verdict("pde.kernel_series_vs_images", e, ck.kernel_tol, e <= ck.kernel_tol);
    r.metadata["t_min"] = ks.t_min;
    out.reports.push_back(r);
  }
  {
    // boundary mass of the kernel seen from a corner: C / sqrt(theta)
    const Point x = relative_point(S.dom, 0.0);
    const double bound = 2.0 * S.dom.dim() / std::sqrt(2.0 * M_PI * c);
    std::vector<double> th, g;
    double worst = 0.0;
    for (int i = 0; i <= 12; ++i) {
      const double theta = 1e-6 * std::pow(10.0, i * 0.25);
      double s = 0.0;
      for (const Face& f : faces(S.dom)) {
        const double y = f.upper ? S.dom.hi(f.axis) : S.dom.lo(f.axis);
        s += neumann_kernel_1d(theta, x[f.axis], y, S.dom.lo(f.axis), S.dom.side(f.axis), c);
      }
      th.push_back(theta);
      g.push_back(s);
      worst = std::max(worst, std::sqrt(theta) * s / bound);
    }
    const Slope sl = loglog_slope(th, g);
    const double dev = std::abs(sl.slope + 0.5);
    TestReport r = verdict("pde.boundary_kernel_sqrt", dev, 0.02, dev <= 0.02 && worst <= 1.001);
    r.metadata["slope"] = sl.slope;
    r.metadata["max_ratio_to_bound"] = worst;
    r.metadata["gronwall_constant"] = duhamel_gronwall_constant(S.dom, S.q, c);
    out.reports.push_back(r);
  }
  {
    PdeOptions po = S.pde;
    po.record_every = 50;
    const TimeSeries u = solve_forward(S.u0_grid, S.q, c, T, po);
    double worst = -INFINITY;
    for (std::size_t i = 1; i < u.snapshots.size(); ++i)
      worst = std::max(worst, u.snapshots[i].integral() - u.snapshots[i - 1].integral());
    const double tol = 1e-13 * S.u0_grid.integral();
    out.reports.push_back(verdict("pde.mass_monotone", worst, tol, worst <= tol));
  }
  {
    const double t = ck.qn_horizon;
    const GridFunction ref = solve_backward_Q(phi, 0.0, t, S.q, c, S.pde);
    bool decreasing = true;
    double prev = INFINITY, last = 0.0;
    TestReport r;
    for (std::size_t i = 0; i < ck.qn_deltas.size(); ++i) {
      const double d = ck.qn_deltas[i];
      const double e = sup_diff(solve_backward_QN(phi, 0.0, t, S.q, d, c, S.pde), ref);
      decreasing = decreasing && e < prev;
      prev = e;
      last = e;
      r.metadata["error[delta=" + num(d) + "]"] = e;
    }
    r.name = "pde.strip_potential_convergence";
    r.statistic = last;
    r.threshold = NAN;
    r.pass = decreasing;
    out.reports.push_back(r);
  }
  {
    double e = 0.0;
    for (int k = 1; k <= 4; ++k)
      for (double s : {0.5, 1.0}) {
        const GammaIdentity g = gamma_identity_check(k, s);
        e = std::max(e, std::abs(g.numeric - g.analytic) / std::abs(g.analytic));
      }
    out.reports.push_back(verdict("pde.gamma_identity", e, ck.gamma_tol, e <= ck.gamma_tol));
  }
}

// ---------------------------------------------------------------------------

double feynman_kac_check(const Setup& S, SuiteResult& out) {
  const auto& ck = S.cfg.checks;
  const double T = ck.fk_horizon;
  ReplicaSpec sp;
  sp.domain = S.dom;
  if (S.cfg.killing.killing_mode() == KillingMode::kStripPotential)
    sp.cfg = PathConfig::strip_potential(ck.fk_dt, S.cfg.c, T, S.cfg.killing.delta,
                                         S.cfg.killing.kappa);
  else
    sp.cfg = PathConfig::local_time(ck.fk_dt, S.cfg.c, T, S.cfg.killing.kappa);
  sp.q = S.q;
  sp.u0 = S.u0;
  sp.particles = ck.fk_paths;
  sp.seed = S.cfg.seed;
  sp.replica = 0x40000000u;
  sp.observables = {constant_observable(S.dom, 1.0, "one")};
  sp.record_steps = {detail::steps_for(T, ck.fk_dt, "checks.fk_horizon")};
  sp.chunk_size = S.cfg.particles.chunk;
  const ReplicaResult run = simulate_replica(sp, S.workers);

  const GridFunction one = S.constant_grid(1.0);
  const GridFunction v =
      S.cfg.killing.killing_mode() == KillingMode::kStripPotential
          ? solve_backward_QN(one, 0.0, T, S.q, S.cfg.killing.delta, S.cfg.c, S.pde)
          : solve_backward_Q(one, 0.0, T, S.q, S.cfg.c, S.pde);
  const double exact = v.inner(S.u0_grid);
  const double p = run.pairings[0][0];
  const double n = static_cast<double>(ck.fk_paths);
  const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
  const double z = std::abs(p - exact) / se;
  TestReport r = verdict("feynman_kac.survival", z, ck.fk_se, z <= ck.fk_se);
  r.metadata["monte_carlo"] = p;
  r.metadata["pde"] = exact;
  r.metadata["std_error"] = se;
  r.metadata["paths"] = n;
  r.metadata["dt"] = ck.fk_dt;
  r.metadata["replica"] = sp.replica;
  out.reports.push_back(r);
  return p;
}

}  // namespace

SuiteResult run_checks(const ExperimentConfig& config, const RunOptions& opt) {
  const Setup S(config, opt);
  SuiteResult result;
  result.suite = "checks";
  spectral_checks(S, result);
  geometry_checks(S, result);
  pde_checks(S, result);
  const double survival = feynman_kac_check(S, result);

  std::ostringstream csv;
  csv << "replica,t,observable_id,value,alive_fraction\n";
  csv << 0x40000000u << ',' << num(S.cfg.checks.fk_horizon) << ",one," << num(survival) << ','
      << num(survival) << '\n';
  json extra;
  extra["checks"] = result.reports.size();
  json cov;
  cov["note"] = "no covariance in this suite";
  detail::write_run(opt, S, result, extra, csv.str(), cov);
  return result;
}

}  // namespace robinfluct
