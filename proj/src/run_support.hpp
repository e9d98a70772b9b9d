#pragma once

// Shared plumbing of the experiment suites; not installed.

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "robinfluct/config.hpp"
#include "robinfluct/experiments.hpp"
#include "robinfluct/grid.hpp"
#include "robinfluct/particles.hpp"
#include "robinfluct/pde.hpp"
#include "robinfluct/spectral.hpp"

namespace robinfluct::detail {

using json = nlohmann::ordered_json;

struct Setup {
  ExperimentConfig cfg;
  BoxDomain dom;
  KillingRate q;
  InitialDensity u0;
  GridFunction u0_grid;
  std::vector<EigenMode> modes;
  PdeOptions pde;
  unsigned workers = 1;

  Setup(const ExperimentConfig& config, const RunOptions& opt);

  std::string label(int index) const { return "phi_" + std::to_string(index); }
  GridFunction mode_grid(int index) const;
  Observable observable(int index) const;
  GridFunction constant_grid(double value) const;
};

/// n with n * dt == t up to rounding; ConfigError naming `field` otherwise.
std::size_t steps_for(double t, double dt, const std::string& field);

/// Shortest round-trip decimal.
std::string num(double v);

TestReport verdict(std::string name, double statistic, double threshold, bool pass);

json report_json(const TestReport& r);
json matrix_json(const Eigen::MatrixXd& m);

/// Writes summary.json, observables.csv, covariance.json, modes.csv,
/// config.toml and manifest.json. No-op for an empty out_dir.
void write_run(const RunOptions& opt, const Setup& setup, const SuiteResult& result,
               json extra, const std::string& observables_csv, json covariance);

}  // namespace robinfluct::detail
