#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "robinfluct/geometry.hpp"
#include "robinfluct/killing.hpp"
#include "robinfluct/sde.hpp"
#include "robinfluct/spectral.hpp"

namespace robinfluct {

/// Initial density u0 >= 0 on D with total mass in (0, 1]. Particles are
/// i.i.d.: alive at t = 0 with probability `mass`, placed with law
/// u0 dx / mass.
struct InitialDensity {
  std::function<double(const Point&)> density;
  double sup = 0.0;
  double mass = 0.0;
  std::string description;

  static InitialDensity uniform(const BoxDomain& dom, double value);
  /// value on the sub-box [lo, hi], zero elsewhere
  static InitialDensity box_indicator(const BoxDomain& dom, std::span<const double> lo,
                                      std::span<const double> hi, double value);
  /// base + amplitude * prod_i cos(m_i pi (x_i - lo_i) / L_i), requires
  /// base >= |amplitude|
  static InitialDensity cosine(const BoxDomain& dom, double base, double amplitude,
                               std::span<const int> multi_index);

  double operator()(const Point& x) const { return density(x); }
};

/// Test function paired against the empirical measure. Derivative data is
/// optional and required only by martingale tracking.
struct Observable {
  std::string id;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  /// A phi = (c/2) Laplacian phi
  std::function<double(const Point&)> generator;
  /// present when the observable is a Neumann eigenmode
  std::optional<EigenMode> mode;

  bool has_derivatives() const { return gradient && generator; }
};

Observable eigen_observable(const BoxDomain& dom, const EigenMode& mode, std::string id = {});
Observable constant_observable(const BoxDomain& dom, double value, std::string id = "one");

struct ParticleEnsemble {
  int dim = 1;
  std::vector<double> positions;  // N x dim, row-major
  std::vector<HazardState> hazards;
  std::size_t step = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;

  std::size_t size() const { return hazards.size(); }
  Point position(std::size_t i) const;
  std::size_t alive_count() const;
};

/// Rejection sampling against sup u0; thresholds i.i.d. Exp(1).
/// Throws std::invalid_argument for a density with zero or > 1 mass.
ParticleEnsemble init_ensemble(const BoxDomain& dom, std::size_t n, const InitialDensity& u0,
                               std::uint64_t seed, std::uint32_t replica = 0);

/// Advances every alive particle by one reflected step of length dt followed
/// by its hazard update. dt == 0 leaves the ensemble unchanged.
ParticleEnsemble step_ensemble(ParticleEnsemble e, const BoxDomain& dom, double dt,
                               const KillingRate& q, const PathConfig& cfg);

/// (1/N) sum over alive particles of phi(X_i); 0 for an empty ensemble.
double empirical_pairing(const ParticleEnsemble& e, const std::function<double(const Point&)>& phi);

struct MartingalePath {
  std::vector<double> times;
  std::vector<double> martingale;
  std::vector<double> predictable_qv;
  std::vector<double> realized_qv;
};

/// Per-particle contribution of one step to M^phi and to its predictable QV.
/// The move is compensated by A phi dt; the kill by phi(x_after) (1 - e^{-dA}).
struct MartingaleIncrement {
  double increment = 0.0;
  double predictable = 0.0;
};

MartingaleIncrement martingale_increment(const Observable& phi, const Point& before,
                                         const Point& after, double hazard, bool killed,
                                         double dt, double c);

/// M^phi, its predictable QV and its realized QV (sum of squared increments)
/// along a trajectory of consecutive ensemble states.
MartingalePath martingale_track(const std::vector<ParticleEnsemble>& trajectory,
                                const Observable& phi, const PathConfig& cfg);

/// Everything needed to run one replica of the N-particle system in a single
/// fused pass (particle-major, fixed-order reductions).
struct ReplicaSpec {
  BoxDomain domain = BoxDomain::unit(1);
  PathConfig cfg;
  KillingRate q;
  InitialDensity u0;
  std::size_t particles = 0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::vector<Observable> observables;
  /// sorted step indices at which pairings are recorded (0 allowed)
  std::vector<std::size_t> record_steps;
  /// observable whose martingale is tracked at every step, if any
  std::optional<Observable> martingale_observable;
  /// particles per reduction chunk; fixed so sums never depend on workers
  std::size_t chunk_size = 256;
};

struct ReplicaResult {
  std::vector<double> times;
  /// pairings[r][k] = <X^N_{t_r}, phi_k>
  std::vector<std::vector<double>> pairings;
  std::vector<double> alive_fraction;
  std::optional<MartingalePath> martingale;
};

ReplicaResult simulate_replica(const ReplicaSpec& spec, unsigned workers = 1);

}  // namespace robinfluct
