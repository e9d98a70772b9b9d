#include "run_support.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robinfluct/parallel.hpp"

#ifndef ROBINFLUCT_VERSION
#define ROBINFLUCT_VERSION "unknown"
#endif

namespace robinfluct {

const char* code_version() { return ROBINFLUCT_VERSION; }

bool SuiteResult::pass() const {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

const TestReport* SuiteResult::find(const std::string& name) const {
  for (const auto& r : reports)
    if (r.name == name) return &r;
  for (const auto& r : diagnostics)
    if (r.name == name) return &r;
  return nullptr;
}

int exit_status(const SuiteResult& result) { return result.pass() ? 0 : 2; }

namespace detail {

Setup::Setup(const ExperimentConfig& config, const RunOptions& opt)
    : cfg(config), dom(config.box()) {
  cfg.validate();
  q = cfg.killing.rate();
  u0 = cfg.initial.density(dom);
  u0_grid = GridFunction::sample(dom, cfg.pde.nodes, u0.density);
  modes = enumerate_modes(dom, cfg.c, cfg.spectral.cutoff);
  pde = cfg.pde_options();
  workers = resolve_workers(opt.threads > 0 ? opt.threads : cfg.threads);
}

GridFunction Setup::mode_grid(int index) const {
  const EigenMode& m = modes.at(static_cast<std::size_t>(index));
  return GridFunction::sample(dom, cfg.pde.nodes, [&](const Point& x) {
    return eval_eigenfunction_unchecked(dom, m, x);
  });
}

Observable Setup::observable(int index) const {
  return eigen_observable(dom, modes.at(static_cast<std::size_t>(index)), label(index));
}

GridFunction Setup::constant_grid(double value) const {
  return GridFunction::sample(dom, cfg.pde.nodes, [value](const Point&) { return value; });
}

std::size_t steps_for(double t, double dt, const std::string& field) {
  const double r = t / dt;
  const double n = std::round(r);
  if (n < 0.0 || std::abs(r - n) > 1e-7 * std::max(1.0, r))
    throw ConfigError(field + ": " + num(t) + " is not a multiple of the step " + num(dt));
  return static_cast<std::size_t>(n);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

TestReport verdict(std::string name, double statistic, double threshold, bool pass) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.pass = pass;
  return r;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

json report_json(const TestReport& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["statistic"] = finite_or_null(r.statistic);
  j["p_value"] = finite_or_null(r.p_value);
  j["threshold"] = finite_or_null(r.threshold);
  json meta = json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = finite_or_null(v);
  j["metadata"] = meta;
  return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(finite_or_null(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

void write_run(const RunOptions& opt, const Setup& setup, const SuiteResult& result,
               json extra, const std::string& observables_csv, json covariance) {
  if (opt.out_dir.empty()) return;
  namespace fs = std::filesystem;
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  json summary;
  summary["suite"] = result.suite;
  summary["pass"] = result.pass();
  summary["config_hash"] = config_hash(setup.cfg);
  summary["code_version"] = code_version();
  summary["provenance"] = {
      {"seed", setup.cfg.seed},
      {"generator", "philox4x32-10"},
      {"stream_key", "(seed, replica, particle, purpose)"},
  };
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(report_json(r));
  summary["reports"] = reports;
  json diags = json::array();
  for (const auto& r : result.diagnostics) diags.push_back(report_json(r));
  summary["diagnostics"] = diags;
  for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();

  covariance["suite"] = result.suite;

  std::ostringstream modes;
  write_modes_csv(modes, setup.dom, setup.modes);

  const std::vector<std::pair<std::string, std::string>> files{
      {"summary.json", summary.dump(2) + "\n"},
      {"observables.csv", observables_csv},
      {"covariance.json", covariance.dump(2) + "\n"},
      {"modes.csv", modes.str()},
      {"config.toml", render_config(setup.cfg)},
  };
  json manifest;
  manifest["suite"] = result.suite;
  manifest["code_version"] = code_version();
  manifest["config_hash"] = config_hash(setup.cfg);
  manifest["seed"] = setup.cfg.seed;
  json digests = json::object();
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
    digests[name] = hex64(fnv1a(body));
  }
  manifest["fnv1a64"] = digests;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

}  // namespace detail
}  // namespace robinfluct
