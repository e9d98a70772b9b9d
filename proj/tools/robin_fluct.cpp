// Command-line driver: lln, clt, ou, checks, config-reference.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "robinfluct/config.hpp"
#include "robinfluct/experiments.hpp"

namespace {

void print_reports(const robinfluct::SuiteResult& r) {
  for (const auto& rep : r.reports)
    std::printf("%-4s %-60s stat=%-12.6g thr=%.6g\n", rep.pass ? "ok" : "FAIL", rep.name.c_str(),
                rep.statistic, rep.threshold);
  for (const auto& rep : r.diagnostics)
    std::printf("%-4s %-60s stat=%-12.6g (diagnostic)\n", rep.pass ? "ok" : "warn",
                rep.name.c_str(), rep.statistic);
  std::printf("%s: %s\n", r.suite.c_str(), r.pass() ? "PASS" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle systems with Robin-type boundary killing: limits and fluctuations"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 0;
  bool quiet = false;

  std::vector<CLI::App*> suites;
  for (const char* name : {"lln", "clt", "ou", "checks"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", out_dir, "run directory");
    sub->add_option("--threads", threads, "worker count")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "suppress the verdict listing");
    suites.push_back(sub);
  }
  suites[0]->description("law of large numbers against the Robin heat equation");
  suites[1]->description("fluctuation covariance, Gaussianity, martingale suite");
  suites[2]->description("Ornstein-Uhlenbeck marginals and increment scaling");
  suites[3]->description("spectral, geometry, PDE and Feynman-Kac invariants");
  app.add_subcommand("config-reference", "print every key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("config-reference")) {
      std::cout << robinfluct::config_reference();
      return 0;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    robinfluct::ExperimentConfig cfg =
        config_path.empty() ? robinfluct::ExperimentConfig{} : robinfluct::load_config(config_path);
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) cfg.seed = seed;
    cfg.validate();
    robinfluct::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    const robinfluct::SuiteResult result = robinfluct::run_suite(name, cfg, opt);
    if (!quiet) print_reports(result);
    return robinfluct::exit_status(result);
  } catch (const robinfluct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
