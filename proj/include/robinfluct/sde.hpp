#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "robinfluct/geometry.hpp"
#include "robinfluct/killing.hpp"
#include "robinfluct/rng.hpp"

namespace robinfluct {

enum class KillingMode {
  /// interior potential q_N = q 1_{D^delta} / delta, hazard dA = q_N dt
  kStripPotential,
  /// boundary local time, hazard dA = 2 q dL with dL = dt/(2 eps) 1_{D^eps}
  kLocalTime,
};

const char* to_string(KillingMode mode);

struct PathConfig {
  double dt = 1e-4;
  double c = 1.0;
  double horizon = 1.0;
  /// width of the strip used by the local-time estimator
  double strip_eps = 1e-2;
  KillingMode mode = KillingMode::kLocalTime;
  /// strip width of the potential (StripPotential only)
  double delta = 0.0;

  /// strip_eps = kappa * sqrt(c dt)
  static PathConfig local_time(double dt, double c, double horizon, double kappa = 1.0);
  static PathConfig strip_potential(double dt, double c, double horizon, double delta,
                                    double kappa = 1.0);

  void validate() const;
  std::size_t steps() const;
};

struct HazardState {
  double accum = 0.0;
  double threshold = 1.0;
  double local_time = 0.0;
  double kill_time = std::numeric_limits<double>::infinity();
  bool alive = true;
};

/// fold(x + sqrt(c dt) noise). `noise` holds dom.dim() standard normals.
Point rbm_step(const BoxDomain& dom, const Point& x, double dt, double c,
               std::span<const double> noise);

/// Occupation-time estimate of the boundary local time increment:
/// dt / (2 eps) if dist(x, dD) < eps, else 0.
double local_time_increment(const BoxDomain& dom, const Point& x, double dt, double strip_eps);

/// Hazard increment dA for a step of length dt observed at state (t, x).
double hazard_increment(const BoxDomain& dom, const Point& x, double t, double dt,
                        const KillingRate& q, const PathConfig& cfg);

/// Adds the hazard of the step ending at grid time t (position x) and clears
/// `alive` the first time accum >= threshold; the kill time is that grid time.
/// Throws std::logic_error on a dead particle.
HazardState hazard_step(HazardState h, const BoxDomain& dom, const Point& x, double t,
                        double dt, const KillingRate& q, const PathConfig& cfg);

/// Path sampled on the grid t_n = n dt, n = 0..steps.
struct SampledPath {
  double dt = 0.0;
  std::vector<Point> points;
};

/// Unkilled reflected path driven by the motion stream of `id`; normals are
/// consumed as index step * d + axis.
SampledPath simulate_path(const BoxDomain& dom, const Point& x0, const PathConfig& cfg,
                          const StreamId& id);

/// exp(-sum of hazard increments along the path), in (0, 1].
double feynman_kac_weight(const BoxDomain& dom, const SampledPath& path, const KillingRate& q,
                          const PathConfig& cfg);

}  // namespace robinfluct
