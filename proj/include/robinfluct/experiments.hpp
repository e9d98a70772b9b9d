#pragma once

#include <string>
#include <vector>

#include "robinfluct/config.hpp"
#include "robinfluct/stats.hpp"

namespace robinfluct {

struct RunOptions {
  /// run directory; created if missing, empty string writes nothing
  std::string out_dir;
  /// 0 resolves through the config, then ROBIN_FLUCT_THREADS
  unsigned threads = 0;
};

struct SuiteResult {
  std::string suite;
  std::vector<TestReport> reports;
  /// verdicts that do not gate the exit status (smoke runs, diagnostics)
  std::vector<TestReport> diagnostics;

  bool pass() const;
  const TestReport* find(const std::string& name) const;
};

/// Large-N system against the forward PDE: sup deviation per observable.
SuiteResult run_lln(const ExperimentConfig& cfg, const RunOptions& opt = {});
/// Replica fluctuation fields against the limiting covariance, Gaussianity,
/// the stationary identity and (when enabled) the martingale suite.
SuiteResult run_clt(const ExperimentConfig& cfg, const RunOptions& opt = {});
/// OU marginals and the increment scaling of simulated paths.
SuiteResult run_ou(const ExperimentConfig& cfg, const RunOptions& opt = {});
/// Invariant suites of the spectral, geometry and PDE layers plus the
/// Feynman-Kac comparison.
SuiteResult run_checks(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Dispatch by subcommand name; throws std::invalid_argument for unknown names.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg,
                      const RunOptions& opt = {});

/// 0 when every gating report passed, 2 otherwise.
int exit_status(const SuiteResult& result);

/// Version string compiled into the manifest.
const char* code_version();

}  // namespace robinfluct
