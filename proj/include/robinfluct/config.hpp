#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "robinfluct/geometry.hpp"
#include "robinfluct/killing.hpp"
#include "robinfluct/particles.hpp"
#include "robinfluct/pde.hpp"
#include "robinfluct/sde.hpp"

namespace robinfluct {

/// Thrown for invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KillingSpec {
  /// "local_time" or "strip"
  std::string mode = "local_time";
  double kappa = 1.0;
  double delta = 0.02;
  /// constant rate, used when the separable tables are empty
  double q = 1.0;
  int axis = 0;
  std::vector<double> time_knots;
  std::vector<double> time_values;
  std::vector<double> space_knots;
  std::vector<double> space_values;

  bool separable() const { return !time_knots.empty(); }
  KillingRate rate() const;
  KillingMode killing_mode() const;
};

struct InitialSpec {
  /// "uniform", "box" or "cosine"
  std::string kind = "uniform";
  double value = 1.0;
  std::vector<double> lo;
  std::vector<double> hi;
  double base = 1.0;
  double amplitude = 0.5;
  std::vector<int> mode;

  InitialDensity density(const BoxDomain& dom) const;
};

struct ParticleSpec {
  std::size_t n = 2000;
  std::size_t replicas = 400;
  double dt = 1e-4;
  double horizon = 0.5;
  std::size_t record_every = 500;
  std::size_t chunk = 256;
};

struct SpectralSpec {
  int cutoff = 200;
  /// <= 0 selects d + 2.5
  double alpha = 0.0;
  /// <= 0 selects d / 2 + 0.5
  double alpha_state = 0.0;
};

struct PdeSpec {
  int nodes = 401;
  double dt = 1e-4;
  double theta = 0.5;
  int rannacher_steps = 2;
};

struct LlnSpec {
  std::size_t particles = 20000;
  double sigma_multiplier = 4.0;
};

struct CltSpec {
  std::vector<double> times{0.1, 0.25};
  int bootstrap = 1000;
  double se_multiplier = 4.0;
  double ks_threshold = 0.01;
  double z_threshold = 3.0;
  double stationary_theory_tol = 1e-6;
  double stationary_rel_tol = 0.15;
};

struct MartingaleSpec {
  /// 0 disables the martingale suite
  std::size_t replicas = 0;
  double horizon = 0.25;
  double qv_rel_tol = 0.1;
  double mean_se = 3.0;
};

struct OuSpec {
  double t0 = 0.25;
  std::vector<int> h_exponents{4, 5, 6, 7, 8, 9};
  std::size_t paths = 4000;
  double dt_pde = 1.0 / 8192.0;
  double slope_target = 1.0;
  double slope_tol = 0.15;
  double variance_se = 4.0;
  /// reference level of the cross-time coupling gap, not gating
  double plan_rel_tol = 1e-2;
};

struct ChecksSpec {
  double weyl_rel_tol = 0.05;
  long long weyl_min_count = 2000;
  double duality_rel_tol = 1e-4;
  double duhamel_tol = 1e-3;
  double duhamel_span = 0.1;
  double decay_tol = 1e-4;
  double decay_horizon = 0.5;
  double fk_se = 3.0;
  std::size_t fk_paths = 100000;
  double fk_horizon = 0.25;
  double fk_dt = 2.5e-5;
  double qn_horizon = 0.25;
  std::vector<double> qn_deltas{0.05, 0.02, 0.01};
  double h_alpha_increment_tol = 1e-4;
  int h_alpha_window = 100;
  int h_alpha_cutoff = 500;
  double gamma_tol = 1e-6;
  double kernel_tol = 1e-8;
  double evolution_tol = 1e-6;
  double orthonormality_tol = 1e-8;
  double residual_tol = 1e-9;
  double energy_rel_tol = 1e-6;
  std::size_t fold_samples = 1000000;
  double fold_p_threshold = 0.001;
};

struct ExperimentConfig {
  std::vector<std::array<double, 2>> domain{{0.0, 1.0}};
  double c = 1.0;
  std::uint64_t seed = 20240601;
  /// 0 defers to ROBIN_FLUCT_THREADS, then hardware concurrency
  unsigned threads = 0;
  KillingSpec killing;
  InitialSpec initial;
  ParticleSpec particles;
  std::vector<int> observables{1, 2, 3};
  SpectralSpec spectral;
  PdeSpec pde;
  LlnSpec lln;
  CltSpec clt;
  MartingaleSpec martingale;
  OuSpec ou;
  ChecksSpec checks;

  BoxDomain box() const;
  PathConfig path_config(double horizon) const;
  PdeOptions pde_options() const;
  double alpha() const;
  double alpha_state() const;

  /// Field-level validation; throws ConfigError.
  void validate() const;
};

/// Parses a TOML file or string; unknown keys and bad types are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Canonical TOML rendering. With `documented` each key carries a comment;
/// the worker count is omitted when `for_hash` is set.
std::string render_config(const ExperimentConfig& cfg, bool documented = false,
                          bool for_hash = false);

/// Commented defaults, the output of `config-reference`.
std::string config_reference();

/// FNV-1a 64 of the canonical rendering (worker count excluded), as hex.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace robinfluct
