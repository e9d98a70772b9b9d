#include "robinfluct/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace robinfluct {

const char* to_string(KillingMode mode) {
  return mode == KillingMode::kLocalTime ? "local_time" : "strip";
}

PathConfig PathConfig::local_time(double dt, double c, double horizon, double kappa) {
  PathConfig cfg;
  cfg.dt = dt;
  cfg.c = c;
  cfg.horizon = horizon;
  cfg.strip_eps = kappa * std::sqrt(c * dt);
  cfg.mode = KillingMode::kLocalTime;
  cfg.validate();
  return cfg;
}

PathConfig PathConfig::strip_potential(double dt, double c, double horizon, double delta,
                                       double kappa) {
  PathConfig cfg = local_time(dt, c, horizon, kappa);
  cfg.mode = KillingMode::kStripPotential;
  cfg.delta = delta;
  cfg.validate();
  return cfg;
}

void PathConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("PathConfig: dt must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("PathConfig: c must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("PathConfig: horizon must be positive");
  if (!(strip_eps > 0.0)) throw std::invalid_argument("PathConfig: strip_eps must be positive");
  if (mode == KillingMode::kStripPotential && !(delta > 0.0))
    throw std::invalid_argument("PathConfig: delta must be positive in strip mode");
}

std::size_t PathConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

Point rbm_step(const BoxDomain& dom, const Point& x, double dt, double c,
               std::span<const double> noise) {
  const double scale = std::sqrt(c * dt);
  Point y = x;
  for (int i = 0; i < dom.dim(); ++i) y[i] = dom.fold_axis(x[i] + scale * noise[i], i);
  return y;
}

double local_time_increment(const BoxDomain& dom, const Point& x, double dt, double strip_eps) {
  return dom.dist_to_boundary(x) < strip_eps ? dt / (2.0 * strip_eps) : 0.0;
}

double hazard_increment(const BoxDomain& dom, const Point& x, double t, double dt,
                        const KillingRate& q, const PathConfig& cfg) {
  const double dist = dom.dist_to_boundary_unchecked(x);
  if (cfg.mode == KillingMode::kLocalTime) {
    if (dist >= cfg.strip_eps) return 0.0;
    return 2.0 * q(t, x) * dt / (2.0 * cfg.strip_eps);
  }
  if (dist >= cfg.delta) return 0.0;
  return q(t, x) / cfg.delta * dt;
}

HazardState hazard_step(HazardState h, const BoxDomain& dom, const Point& x, double t,
                        double dt, const KillingRate& q, const PathConfig& cfg) {
  if (!h.alive) throw std::logic_error("hazard_step: particle is already dead");
  h.local_time += local_time_increment(dom, x, dt, cfg.strip_eps);
  h.accum += hazard_increment(dom, x, t, dt, q, cfg);
  if (h.accum >= h.threshold) {
    h.alive = false;
    h.kill_time = t;
  }
  return h;
}

SampledPath simulate_path(const BoxDomain& dom, const Point& x0, const PathConfig& cfg,
                          const StreamId& id) {
  cfg.validate();
  StreamId motion = id;
  motion.purpose = Purpose::kMotion;
  NormalStream normals(motion);
  SampledPath path;
  path.dt = cfg.dt;
  const std::size_t n = cfg.steps();
  path.points.reserve(n + 1);
  path.points.push_back(x0);
  std::array<double, kMaxDim> noise{};
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < dom.dim(); ++i) noise[i] = normals.next();
    path.points.push_back(rbm_step(dom, path.points.back(), cfg.dt, cfg.c,
                                   std::span<const double>(noise.data(), dom.dim())));
  }
  return path;
}

double feynman_kac_weight(const BoxDomain& dom, const SampledPath& path, const KillingRate& q,
                          const PathConfig& cfg) {
  double a = 0.0;
  for (std::size_t k = 1; k < path.points.size(); ++k)
    a += hazard_increment(dom, path.points[k], k * path.dt, path.dt, q, cfg);
  return std::exp(-a);
}

}  // namespace robinfluct
