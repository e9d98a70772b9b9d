#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "robinfluct/config.hpp"
#include "robinfluct/experiments.hpp"

using namespace robinfluct;
namespace fs = std::filesystem;

namespace {

ExperimentConfig smoke() {
  return load_config(std::string(ROBINFLUCT_SOURCE_DIR) + "/configs/smoke.toml");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("robinfluct_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Experiments, LlnWritesRunDirectory) {
  const fs::path dir = scratch("lln");
  RunOptions opt;
  opt.out_dir = dir.string();
  opt.threads = 1;
  const SuiteResult r = run_lln(smoke(), opt);
  EXPECT_EQ(r.suite, "lln");
  EXPECT_FALSE(r.reports.empty());
  for (const char* f : {"summary.json", "observables.csv", "covariance.json", "modes.csv",
                        "manifest.json", "config.toml"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(slurp(dir / "manifest.json").find("time"), std::string::npos);
  EXPECT_NO_THROW(parse_config(slurp(dir / "config.toml")).validate());
}

TEST(Experiments, UnknownSuite) {
  EXPECT_THROW(run_suite("nope", ExperimentConfig{}), std::invalid_argument);
}

TEST(Experiments, ExitStatus) {
  SuiteResult r;
  r.reports.push_back(TestReport{"a", 0.0, 0.0, 1.0, true, {}});
  EXPECT_EQ(exit_status(r), 0);
  r.diagnostics.push_back(TestReport{"d", 0.0, 0.0, 1.0, false, {}});
  EXPECT_EQ(exit_status(r), 0);
  r.reports.push_back(TestReport{"b", 2.0, 0.0, 1.0, false, {}});
  EXPECT_EQ(exit_status(r), 2);
  EXPECT_NE(r.find("d"), nullptr);
}

TEST(Experiments, CltBytesIndependentOfThreads) {
  std::string first;
  for (unsigned threads : {1u, 2u}) {
    const fs::path dir = scratch("clt" + std::to_string(threads));
    RunOptions opt;
    opt.out_dir = dir.string();
    opt.threads = threads;
    (void)run_clt(smoke(), opt);
    const std::string body = slurp(dir / "summary.json") + slurp(dir / "observables.csv") +
                             slurp(dir / "field.csv") + slurp(dir / "manifest.json");
    if (first.empty())
      first = body;
    else
      EXPECT_EQ(body, first);
  }
}
