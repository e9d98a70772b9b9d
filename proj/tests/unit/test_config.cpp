#include <gtest/gtest.h>

#include <string>

#include "robinfluct/config.hpp"

using namespace robinfluct;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsValidate) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.box().dim(), 1);
}

TEST(Config, RoundTrip) {
  ExperimentConfig cfg;
  cfg.domain = {{0.0, 1.0}, {-1.0, 2.5}};
  cfg.c = 0.75;
  cfg.initial.value = 0.25;
  cfg.killing.mode = "strip";
  cfg.killing.time_knots = {0.0, 1.0};
  cfg.killing.time_values = {1.0, 2.0};
  cfg.killing.space_knots = {0.0, 1.0};
  cfg.killing.space_values = {0.5, 0.5};
  cfg.observables = {0, 4};
  cfg.particles.dt = 1.0 / 3.0;
  const std::string text = render_config(cfg);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(render_config(back), text);
  EXPECT_EQ(back.particles.dt, 1.0 / 3.0);
  EXPECT_TRUE(back.killing.separable());
  EXPECT_EQ(config_hash(back), config_hash(cfg));
}

TEST(Config, EmptyArraysRoundTrip) {
  ExperimentConfig cfg;
  const ExperimentConfig back = parse_config(render_config(cfg));
  EXPECT_TRUE(back.killing.time_knots.empty());
  EXPECT_TRUE(back.initial.lo.empty());
}

TEST(Config, UnknownKeysAndTypes) {
  EXPECT_NE(error_of("[particles]\ndtt = 0.1\n").find("particles.dtt"), std::string::npos);
  EXPECT_NE(error_of("bogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(error_of("[particles]\ndt = \"x\"\n").find("particles.dt"), std::string::npos);
  EXPECT_NE(error_of("[particles]\ndt = -1.0\n").find("particles.dt"), std::string::npos);
  EXPECT_NE(error_of("c = [1\n"), "");
}

TEST(Config, FieldValidation) {
  EXPECT_NE(error_of("observables = []\n").find("observables"), std::string::npos);
  EXPECT_NE(error_of("domain = [[1.0, 0.0]]\n").find("domain"), std::string::npos);
  EXPECT_NE(error_of("[killing]\nmode = \"wall\"\n").find("killing.mode"), std::string::npos);
  EXPECT_NE(error_of("[clt]\ntimes = [5.0]\n").find("clt.times"), std::string::npos);
  EXPECT_NE(error_of("[initial]\nvalue = 2.0\n"), "");
  EXPECT_NE(error_of("[killing]\ntime_knots = [0.0, 0.0]\ntime_values = [1.0, 1.0]\n"
                     "space_knots = [0.0]\nspace_values = [1.0]\n")
                .find("killing.time_knots"),
            std::string::npos);
}

TEST(Config, IntegersAcceptedForFloats) {
  const ExperimentConfig cfg = parse_config("c = 2\n");
  EXPECT_DOUBLE_EQ(cfg.c, 2.0);
}

TEST(Config, HashIgnoresThreads) {
  ExperimentConfig a, b;
  b.threads = 7;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = a.seed + 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ReferenceParsesToDefaults) {
  const std::string ref = config_reference();
  EXPECT_NE(ref.find("[particles]"), std::string::npos);
  const ExperimentConfig cfg = parse_config(ref);
  EXPECT_EQ(render_config(cfg), render_config(ExperimentConfig{}));
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"stationary", "martingale", "strip", "smoke"}) {
    const std::string path = std::string(ROBINFLUCT_SOURCE_DIR) + "/configs/" + name + ".toml";
    EXPECT_NO_THROW(load_config(path).validate()) << name;
  }
  EXPECT_THROW(load_config("/nonexistent/robin.toml"), ConfigError);
}
