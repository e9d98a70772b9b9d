#include "robinfluct/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace robinfluct {

KillingRate KillingSpec::rate() const {
  if (!separable()) return KillingRate::constant(q);
  return KillingRate::separable(PiecewiseLinear(time_knots, time_values), axis,
                                PiecewiseLinear(space_knots, space_values));
}

KillingMode KillingSpec::killing_mode() const {
  return mode == "strip" ? KillingMode::kStripPotential : KillingMode::kLocalTime;
}

InitialDensity InitialSpec::density(const BoxDomain& dom) const {
  if (kind == "uniform") return InitialDensity::uniform(dom, value);
  if (kind == "box") return InitialDensity::box_indicator(dom, lo, hi, value);
  if (kind == "cosine") return InitialDensity::cosine(dom, base, amplitude, mode);
  throw ConfigError("initial.kind: unknown kind '" + kind + "'");
}

BoxDomain ExperimentConfig::box() const {
  std::vector<double> lo, hi;
  for (const auto& b : domain) {
    lo.push_back(b[0]);
    hi.push_back(b[1]);
  }
  return BoxDomain(lo, hi);
}

PathConfig ExperimentConfig::path_config(double horizon) const {
  if (killing.killing_mode() == KillingMode::kStripPotential)
    return PathConfig::strip_potential(particles.dt, c, horizon, killing.delta, killing.kappa);
  return PathConfig::local_time(particles.dt, c, horizon, killing.kappa);
}

PdeOptions ExperimentConfig::pde_options() const {
  PdeOptions o;
  o.dt = pde.dt;
  o.theta = pde.theta;
  o.rannacher_steps = pde.rannacher_steps;
  return o;
}

double ExperimentConfig::alpha() const {
  return spectral.alpha > 0.0 ? spectral.alpha : static_cast<double>(domain.size()) + 2.5;
}

double ExperimentConfig::alpha_state() const {
  return spectral.alpha_state > 0.0 ? spectral.alpha_state
                                    : 0.5 * static_cast<double>(domain.size()) + 0.5;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) fail(field, what);
}

void check_table(const std::vector<double>& knots, const std::vector<double>& values,
                 const std::string& field) {
  require(!knots.empty(), field + "_knots", "must not be empty");
  require(knots.size() == values.size(), field + "_values", "must match the knot count");
  for (std::size_t i = 1; i < knots.size(); ++i)
    require(knots[i] > knots[i - 1], field + "_knots", "must be strictly increasing");
  for (double v : values) require(v >= 0.0, field + "_values", "must be nonnegative");
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!domain.empty() && domain.size() <= 3, "domain", "needs 1 to 3 [lo, hi] pairs");
  for (const auto& b : domain)
    require(std::isfinite(b[0]) && std::isfinite(b[1]) && b[1] > b[0], "domain",
            "each pair must satisfy lo < hi");
  const int d = static_cast<int>(domain.size());
  const BoxDomain dom = box();
  require(c > 0.0, "c", "must be positive");

  require(killing.mode == "local_time" || killing.mode == "strip", "killing.mode",
          "must be \"local_time\" or \"strip\"");
  require(killing.kappa > 0.0, "killing.kappa", "must be positive");
  if (killing.mode == "strip")
    require(killing.delta > 0.0 && killing.delta < 0.5 * dom.min_side(), "killing.delta",
            "must lie in (0, min_side / 2)");
  require(killing.q >= 0.0, "killing.q", "must be nonnegative");
  if (killing.separable() || !killing.space_knots.empty()) {
    require(killing.axis >= 0 && killing.axis < d, "killing.axis", "must name a domain axis");
    check_table(killing.time_knots, killing.time_values, "killing.time");
    check_table(killing.space_knots, killing.space_values, "killing.space");
  }

  require(initial.kind == "uniform" || initial.kind == "box" || initial.kind == "cosine",
          "initial.kind", "must be \"uniform\", \"box\" or \"cosine\"");
  if (initial.kind == "box") {
    require(static_cast<int>(initial.lo.size()) == d, "initial.lo", "needs one entry per axis");
    require(static_cast<int>(initial.hi.size()) == d, "initial.hi", "needs one entry per axis");
  }
  if (initial.kind == "cosine")
    require(static_cast<int>(initial.mode.size()) == d, "initial.mode", "needs one entry per axis");
  try {
    const InitialDensity u0 = initial.density(dom);
    require(u0.mass <= 1.0 + 1e-12, "initial", "total mass must be at most 1");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("initial", e.what());
  }

  require(particles.n >= 1, "particles.n", "must be at least 1");
  require(particles.n <= 0xFFFFFFFFull, "particles.n", "must fit in 32 bits");
  require(particles.replicas >= 1, "particles.replicas", "must be at least 1");
  require(particles.dt > 0.0, "particles.dt", "must be positive");
  require(particles.horizon > 0.0, "particles.horizon", "must be positive");
  require(particles.record_every >= 1, "particles.record_every", "must be at least 1");
  require(particles.chunk >= 1, "particles.chunk", "must be at least 1");

  require(spectral.cutoff >= 1, "spectral.cutoff", "must be at least 1");
  require(!observables.empty(), "observables", "mode list must not be empty");
  for (int k : observables)
    require(k >= 0 && k < spectral.cutoff, "observables",
            "mode indices must lie in [0, spectral.cutoff)");

  require(pde.nodes >= 3, "pde.nodes", "must be at least 3");
  require(pde.dt > 0.0, "pde.dt", "must be positive");
  require(pde.theta >= 0.5 && pde.theta <= 1.0, "pde.theta", "must lie in [0.5, 1]");
  require(pde.rannacher_steps >= 0, "pde.rannacher_steps", "must be nonnegative");

  require(lln.particles >= 1 && lln.particles <= 0xFFFFFFFFull, "lln.particles",
          "must lie in [1, 2^32)");
  require(lln.sigma_multiplier > 0.0, "lln.sigma_multiplier", "must be positive");
  require(!clt.times.empty(), "clt.times", "must not be empty");
  for (double t : clt.times)
    require(t > 0.0 && t <= particles.horizon + 1e-12, "clt.times",
            "must lie in (0, particles.horizon]");
  require(clt.bootstrap >= 2, "clt.bootstrap", "must be at least 2");
  require(clt.se_multiplier > 0.0, "clt.se_multiplier", "must be positive");
  require(clt.ks_threshold > 0.0 && clt.ks_threshold < 1.0, "clt.ks_threshold",
          "must lie in (0, 1)");
  require(clt.z_threshold > 0.0, "clt.z_threshold", "must be positive");
  require(martingale.horizon > 0.0, "martingale.horizon", "must be positive");
  require(martingale.qv_rel_tol > 0.0, "martingale.qv_rel_tol", "must be positive");
  require(ou.t0 > 0.0, "ou.t0", "must be positive");
  require(ou.h_exponents.size() >= 4, "ou.h_exponents", "needs at least 4 entries");
  for (int e : ou.h_exponents) require(e >= 1 && e <= 30, "ou.h_exponents", "must lie in [1, 30]");
  require(ou.paths >= 2, "ou.paths", "must be at least 2");
  require(ou.dt_pde > 0.0, "ou.dt_pde", "must be positive");
  require(ou.slope_tol > 0.0, "ou.slope_tol", "must be positive");
  require(checks.fk_paths >= 2, "checks.fk_paths", "must be at least 2");
  require(checks.fk_dt > 0.0, "checks.fk_dt", "must be positive");
  require(checks.qn_deltas.size() >= 2, "checks.qn_deltas", "needs at least 2 entries");
  for (double v : checks.qn_deltas)
    require(v > 0.0 && v < 0.5 * dom.min_side(), "checks.qn_deltas",
            "must lie in (0, min_side / 2)");
  require(checks.h_alpha_window >= 1, "checks.h_alpha_window", "must be at least 1");
  require(checks.h_alpha_cutoff > checks.h_alpha_window, "checks.h_alpha_cutoff",
          "must exceed checks.h_alpha_window");
  require(checks.weyl_min_count >= 100, "checks.weyl_min_count", "must be at least 100");
  require(checks.fold_samples >= 1000, "checks.fold_samples", "must be at least 1000");
}

// ---------------------------------------------------------------------------
// field registry shared by the parser and the renderer

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v, std::string (*one)(T)) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += one(v[i]);
  }
  return s + "]";
}

std::string fmt_int(int v) { return std::to_string(v); }
std::string fmt_dbl(double v) { return fmt_double(v); }

double read_double(const toml::node& n, const std::string& path) {
  if (auto v = n.value<double>()) return *v;
  fail(path, "expected a number");
}

long long read_int(const toml::node& n, const std::string& path) {
  if (!n.is_integer()) fail(path, "expected an integer");
  return *n.value<long long>();
}

std::string read_string(const toml::node& n, const std::string& path) {
  if (!n.is_string()) fail(path, "expected a string");
  return *n.value<std::string>();
}

const toml::array& read_array(const toml::node& n, const std::string& path) {
  if (!n.is_array()) fail(path, "expected an array");
  return *n.as_array();
}

std::vector<double> read_doubles(const toml::node& n, const std::string& path) {
  std::vector<double> out;
  for (const auto& e : read_array(n, path)) out.push_back(read_double(e, path));
  return out;
}

std::vector<int> read_ints(const toml::node& n, const std::string& path) {
  std::vector<int> out;
  for (const auto& e : read_array(n, path)) {
    const long long v = read_int(e, path);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      fail(path, "integer out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::string doc;
  std::function<void(const toml::node&, ExperimentConfig&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <typename Get>
Field dbl(std::string s, std::string k, std::string doc, Get get) {
  return {s, k, doc,
          [get](const toml::node& n, ExperimentConfig& c, const std::string& p) {
            get(c) = read_double(n, p);
          },
          [get](const ExperimentConfig& c) {
            return fmt_double(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Get>
Field integer(std::string s, std::string k, std::string doc, Get get) {
  return {s, k, doc,
          [get](const toml::node& n, ExperimentConfig& c, const std::string& p) {
            using T = std::remove_reference_t<decltype(get(c))>;
            const long long v = read_int(n, p);
            if constexpr (std::is_unsigned_v<T>) {
              if (v < 0) fail(p, "must be nonnegative");
            }
            get(c) = static_cast<T>(v);
          },
          [get](const ExperimentConfig& c) {
            return std::to_string(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Get>
Field str(std::string s, std::string k, std::string doc, Get get) {
  return {s, k, doc,
          [get](const toml::node& n, ExperimentConfig& c, const std::string& p) {
            get(c) = read_string(n, p);
          },
          [get](const ExperimentConfig& c) {
            return "\"" + get(const_cast<ExperimentConfig&>(c)) + "\"";
          }};
}

template <typename Get>
Field dbls(std::string s, std::string k, std::string doc, Get get) {
  return {s, k, doc,
          [get](const toml::node& n, ExperimentConfig& c, const std::string& p) {
            get(c) = read_doubles(n, p);
          },
          [get](const ExperimentConfig& c) {
            return fmt_list(get(const_cast<ExperimentConfig&>(c)), fmt_dbl);
          }};
}

template <typename Get>
Field ints(std::string s, std::string k, std::string doc, Get get) {
  return {s, k, doc,
          [get](const toml::node& n, ExperimentConfig& c, const std::string& p) {
            get(c) = read_ints(n, p);
          },
          [get](const ExperimentConfig& c) {
            return fmt_list(get(const_cast<ExperimentConfig&>(c)), fmt_int);
          }};
}

#define F(expr) [](ExperimentConfig& c) -> auto& { return expr; }

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back({"", "domain", "box as [[lo, hi], ...], 1 to 3 axes",
                 [](const toml::node& n, ExperimentConfig& c, const std::string& p) {
                   c.domain.clear();
                   for (const auto& e : read_array(n, p)) {
                     const auto v = read_doubles(e, p);
                     if (v.size() != 2) fail(p, "each entry must be [lo, hi]");
                     c.domain.push_back({v[0], v[1]});
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string s = "[";
                   for (std::size_t i = 0; i < c.domain.size(); ++i) {
                     if (i) s += ", ";
                     s += "[" + fmt_double(c.domain[i][0]) + ", " + fmt_double(c.domain[i][1]) + "]";
                   }
                   return s + "]";
                 }});
    f.push_back(dbl("", "c", "diffusivity, generator (c/2) Laplacian", F(c.c)));
    f.push_back(integer("", "seed", "master seed of every random stream", F(c.seed)));
    f.push_back(integer("", "threads",
                        "worker count; 0 uses ROBIN_FLUCT_THREADS, then all cores",
                        F(c.threads)));
    f.push_back(ints("", "observables", "test functions as indices into the sorted mode list "
                                        "(0 is the constant mode)",
                     F(c.observables)));

    f.push_back(str("killing", "mode", "\"local_time\" or \"strip\"", F(c.killing.mode)));
    f.push_back(dbl("killing", "kappa", "local-time strip width eps = kappa sqrt(c dt)",
                    F(c.killing.kappa)));
    f.push_back(dbl("killing", "delta", "strip width of the potential (strip mode)",
                    F(c.killing.delta)));
    f.push_back(dbl("killing", "q", "constant killing rate (used without tables)",
                    F(c.killing.q)));
    f.push_back(integer("killing", "axis", "axis of the space table", F(c.killing.axis)));
    f.push_back(dbls("killing", "time_knots", "separable q(t, x) = f(t) g(x_axis): knots of f",
                     F(c.killing.time_knots)));
    f.push_back(dbls("killing", "time_values", "values of f", F(c.killing.time_values)));
    f.push_back(dbls("killing", "space_knots", "knots of g", F(c.killing.space_knots)));
    f.push_back(dbls("killing", "space_values", "values of g", F(c.killing.space_values)));

    f.push_back(str("initial", "kind", "\"uniform\", \"box\" or \"cosine\"", F(c.initial.kind)));
    f.push_back(dbl("initial", "value", "density level (uniform, box)", F(c.initial.value)));
    f.push_back(dbls("initial", "lo", "box lower corner", F(c.initial.lo)));
    f.push_back(dbls("initial", "hi", "box upper corner", F(c.initial.hi)));
    f.push_back(dbl("initial", "base", "cosine: base + amplitude prod cos", F(c.initial.base)));
    f.push_back(dbl("initial", "amplitude", "cosine amplitude", F(c.initial.amplitude)));
    f.push_back(ints("initial", "mode", "cosine multi-index", F(c.initial.mode)));

    f.push_back(integer("particles", "n", "particles per replica", F(c.particles.n)));
    f.push_back(integer("particles", "replicas", "independent replicas (clt)",
                        F(c.particles.replicas)));
    f.push_back(dbl("particles", "dt", "particle time step", F(c.particles.dt)));
    f.push_back(dbl("particles", "horizon", "final time T", F(c.particles.horizon)));
    f.push_back(integer("particles", "record_every", "steps between recorded pairings",
                        F(c.particles.record_every)));
    f.push_back(integer("particles", "chunk", "particles per reduction chunk",
                        F(c.particles.chunk)));

    f.push_back(integer("spectral", "cutoff", "number K of modes", F(c.spectral.cutoff)));
    f.push_back(dbl("spectral", "alpha", "CLT space index; <= 0 selects d + 2.5",
                    F(c.spectral.alpha)));
    f.push_back(dbl("spectral", "alpha_state", "state-space index; <= 0 selects d/2 + 0.5",
                    F(c.spectral.alpha_state)));

    f.push_back(integer("pde", "nodes", "grid nodes per axis, faces included", F(c.pde.nodes)));
    f.push_back(dbl("pde", "dt", "PDE time step", F(c.pde.dt)));
    f.push_back(dbl("pde", "theta", "0.5 Crank-Nicolson, 1 implicit Euler", F(c.pde.theta)));
    f.push_back(integer("pde", "rannacher_steps", "leading implicit Euler steps",
                        F(c.pde.rannacher_steps)));

    f.push_back(integer("lln", "particles", "particles of the single large system",
                        F(c.lln.particles)));
    f.push_back(dbl("lln", "sigma_multiplier", "allowed deviation in units of sqrt(<phi^2,u>/N)",
                    F(c.lln.sigma_multiplier)));

    f.push_back(dbls("clt", "times", "comparison times", F(c.clt.times)));
    f.push_back(integer("clt", "bootstrap", "bootstrap resamples", F(c.clt.bootstrap)));
    f.push_back(dbl("clt", "se_multiplier", "covariance tolerance in bootstrap SEs",
                    F(c.clt.se_multiplier)));
    f.push_back(dbl("clt", "ks_threshold", "minimum KS p-value", F(c.clt.ks_threshold)));
    f.push_back(dbl("clt", "z_threshold", "maximum |skew z| and |kurtosis z|",
                    F(c.clt.z_threshold)));
    f.push_back(dbl("clt", "stationary_theory_tol",
                    "stationary case: |theoretical Var - 1| bound", F(c.clt.stationary_theory_tol)));
    f.push_back(dbl("clt", "stationary_rel_tol", "stationary case: relative empirical bound",
                    F(c.clt.stationary_rel_tol)));

    f.push_back(integer("martingale", "replicas", "replicas of the martingale suite; 0 disables",
                        F(c.martingale.replicas)));
    f.push_back(dbl("martingale", "horizon", "final time of the martingale suite",
                    F(c.martingale.horizon)));
    f.push_back(dbl("martingale", "qv_rel_tol", "relative realized vs predictable QV bound",
                    F(c.martingale.qv_rel_tol)));
    f.push_back(dbl("martingale", "mean_se", "bound on |mean M_T| in standard errors",
                    F(c.martingale.mean_se)));

    f.push_back(dbl("ou", "t0", "base time of the increment study", F(c.ou.t0)));
    f.push_back(ints("ou", "h_exponents", "increments h = 2^-k", F(c.ou.h_exponents)));
    f.push_back(integer("ou", "paths", "simulated OU paths", F(c.ou.paths)));
    f.push_back(dbl("ou", "dt_pde", "PDE step of the OU plan (divides every time)",
                    F(c.ou.dt_pde)));
    f.push_back(dbl("ou", "slope_target", "expected log-log slope", F(c.ou.slope_target)));
    f.push_back(dbl("ou", "slope_tol", "allowed slope deviation", F(c.ou.slope_tol)));
    f.push_back(dbl("ou", "variance_se", "marginal variance tolerance in SEs",
                    F(c.ou.variance_se)));

    f.push_back(dbl("ou", "plan_rel_tol", "reference level of the cross-time coupling gap (diagnostic)",
                    F(c.ou.plan_rel_tol)));

    f.push_back(dbl("checks", "weyl_rel_tol", "Weyl ratio relative tolerance",
                    F(c.checks.weyl_rel_tol)));
    f.push_back(integer("checks", "weyl_min_count", "modes counted for the Weyl ratio",
                        F(c.checks.weyl_min_count)));
    f.push_back(dbl("checks", "duality_rel_tol", "forward/backward duality tolerance",
                    F(c.checks.duality_rel_tol)));
    f.push_back(dbl("checks", "duhamel_tol", "CN vs Duhamel sup tolerance",
                    F(c.checks.duhamel_tol)));
    f.push_back(dbl("checks", "duhamel_span", "t - s of the Duhamel comparison",
                    F(c.checks.duhamel_span)));
    f.push_back(dbl("checks", "decay_tol", "eigenmode decay sup tolerance", F(c.checks.decay_tol)));
    f.push_back(dbl("checks", "decay_horizon", "eigenmode decay horizon",
                    F(c.checks.decay_horizon)));
    f.push_back(dbl("checks", "fk_se", "Feynman-Kac tolerance in standard errors",
                    F(c.checks.fk_se)));
    f.push_back(integer("checks", "fk_paths", "Feynman-Kac paths", F(c.checks.fk_paths)));
    f.push_back(dbl("checks", "fk_horizon", "Feynman-Kac horizon", F(c.checks.fk_horizon)));
    f.push_back(dbl("checks", "fk_dt", "Feynman-Kac path step", F(c.checks.fk_dt)));
    f.push_back(dbl("checks", "qn_horizon", "horizon of the strip-potential comparison",
                    F(c.checks.qn_horizon)));
    f.push_back(dbls("checks", "qn_deltas", "strip widths, decreasing", F(c.checks.qn_deltas)));
    f.push_back(dbl("checks", "h_alpha_increment_tol", "Cauchy bound on window increments",
                    F(c.checks.h_alpha_increment_tol)));
    f.push_back(integer("checks", "h_alpha_window", "modes per increment window",
                        F(c.checks.h_alpha_window)));
    f.push_back(integer("checks", "h_alpha_cutoff", "cutoff where increments are measured",
                        F(c.checks.h_alpha_cutoff)));
    f.push_back(dbl("checks", "gamma_tol", "iterated-integral identity tolerance",
                    F(c.checks.gamma_tol)));
    f.push_back(dbl("checks", "kernel_tol", "heat kernel series vs images tolerance",
                    F(c.checks.kernel_tol)));
    f.push_back(dbl("checks", "evolution_tol", "evolution property tolerance",
                    F(c.checks.evolution_tol)));
    f.push_back(dbl("checks", "orthonormality_tol", "Gram matrix tolerance",
                    F(c.checks.orthonormality_tol)));
    f.push_back(dbl("checks", "residual_tol", "eigenpair residual tolerance",
                    F(c.checks.residual_tol)));
    f.push_back(dbl("checks", "energy_rel_tol", "Dirichlet energy identity tolerance",
                    F(c.checks.energy_rel_tol)));
    f.push_back(integer("checks", "fold_samples", "samples of the folding uniformity test",
                        F(c.checks.fold_samples)));
    f.push_back(dbl("checks", "fold_p_threshold", "minimum chi-square p-value",
                    F(c.checks.fold_p_threshold)));
    return f;
  }();
  return fields;
}

#undef F

ExperimentConfig from_table(const toml::table& root, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> sections;
  for (const auto& f : registry()) sections.insert(f.section);
  auto find = [](const std::string& s, const std::string& k) -> const Field* {
    for (const auto& f : registry())
      if (f.section == s && f.key == k) return &f;
    return nullptr;
  };
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (node.is_table() && sections.count(k) && !k.empty()) {
      for (const auto& [sub, value] : *node.as_table()) {
        const std::string sk(sub.str());
        const Field* f = find(k, sk);
        if (!f) throw ConfigError(source + ": unknown key '" + k + "." + sk + "'");
        f->read(value, cfg, k + "." + sk);
      }
      continue;
    }
    const Field* f = find("", k);
    if (!f) throw ConfigError(source + ": unknown key '" + k + "'");
    f->read(node, cfg, k);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  try {
    return from_table(toml::parse(text, source), source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return from_table(toml::parse_file(path), path);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
}

std::string render_config(const ExperimentConfig& cfg, bool documented, bool for_hash) {
  std::ostringstream os;
  std::string current = "\x01";
  for (const auto& f : registry()) {
    if (for_hash && f.section.empty() && f.key == "threads") continue;
    if (f.section != current) {
      if (!f.section.empty()) os << "\n[" << f.section << "]\n";
      current = f.section;
    }
    if (documented) os << "# " << f.doc << "\n";
    os << f.key << " = " << f.write(cfg) << "\n";
  }
  return os.str();
}

std::string config_reference() {
  return "# robin_fluct configuration reference (all defaults)\n" +
         render_config(ExperimentConfig{}, true, false);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = render_config(cfg, false, true);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace robinfluct
