#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpflow/config.hpp"
#include "tpflow/scenarios.hpp"

using namespace tpflow;
namespace fs = std::filesystem;

TEST(Config, Defaults) {
  const RunConfig q = default_config("q5spot");
  EXPECT_EQ(q.degree, 2);
  EXPECT_EQ(q.tol, 1e-5);
  EXPECT_EQ(q.max_iters, 50);
  EXPECT_EQ(q.final_time, 750.0);
  EXPECT_EQ(default_config("converge").degree, 1);
  EXPECT_THROW(default_config("nope"), ConfigError);
  EXPECT_NO_THROW(validate_config(q));
  EXPECT_NO_THROW(validate_config(default_config("longtime")));
}

TEST(Config, ParseAndReject) {
  const RunConfig c = parse_config("# comment\nscheme = TL2\ntau = 0.25  # trailing\nmesh=8\n", default_config("custom"));
  EXPECT_EQ(c.scheme, "TL2");
  EXPECT_EQ(c.tau, 0.25);
  EXPECT_EQ(c.mesh, 8);
  EXPECT_THROW(parse_config("colour = red\n", default_config("custom")), ConfigError);
  EXPECT_THROW(parse_config("tau = fast\n", default_config("custom")), ConfigError);
  EXPECT_THROW(parse_config("mesh = 4\nmesh = 8\n", default_config("custom")), ConfigError);
  EXPECT_THROW(parse_config("no equals sign\n", default_config("custom")), ConfigError);
  EXPECT_THROW(parse_config("scenario = q5spot\n", default_config("custom")), ConfigError);
}

TEST(Config, Validation) {
  RunConfig c = default_config("custom");
  c.model = "brooks-corey";
  EXPECT_THROW(validate_config(c), ConfigError);
  c = default_config("custom");
  c.scheme = "RK4";
  EXPECT_THROW(validate_config(c), ConfigError);
  c = default_config("converge");
  c.meshes = {8, 4};
  EXPECT_THROW(validate_config(c), ConfigError);
  c = default_config("custom");
  c.degree = 3;
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(Config, RoundTrip) {
  RunConfig c = default_config("longtime");
  c.taus = {0.05, 0.1};
  c.timing = true;
  const RunConfig d = parse_config(to_text(c), default_config("longtime"));
  EXPECT_EQ(to_text(c), to_text(d));
}

TEST(Config, RunWritesResolvedConfigAndDeterministicCsv) {
  const fs::path dir = fs::temp_directory_path() / "tpflow_config_test";
  fs::remove_all(dir);
  RunConfig c = default_config("custom");
  c.problem = "relax";
  c.mesh = 4;
  c.tau = 0.25;
  c.final_time = 0.5;
  std::ostringstream log;
  const auto read = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  c.output_dir = (dir / "a").string();
  ASSERT_EQ(cmd_run(c, log), 0);
  c.output_dir = (dir / "b").string();
  ASSERT_EQ(cmd_run(c, log), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "config.resolved"));
  EXPECT_EQ(read(dir / "a" / "steps.csv"), read(dir / "b" / "steps.csv"));
  EXPECT_EQ(read(dir / "a" / "energy.csv"), read(dir / "b" / "energy.csv"));
  const RunConfig echoed = load_config((dir / "a" / "config.resolved").string());
  EXPECT_EQ(echoed.problem, "relax");
  EXPECT_EQ(echoed.mesh, 4);
  fs::remove_all(dir);
}
