#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cavband/run.hpp"

using namespace cavband;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cavband_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  static RunConfig config(const std::string& command, json flags) {
    return resolve_config(command, nullptr, flags);
  }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(CAVBAND_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST(RunConfig, Precedence) {
  const json file{{"V0", 0.2}, {"N", 5}, {"Ng", 12}};
  const json flags{{"N", 4}};
  const auto c = resolve_config("chern", file, flags);
  EXPECT_EQ(*c.V0, 0.2);
  EXPECT_EQ(*c.N, 4);
  EXPECT_EQ(c.Ng, 12);

  const auto swapped = resolve_config("chern", json{{"V0", 0.2}}, json{{"gamma", 0.01}});
  EXPECT_FALSE(swapped.V0.has_value());
  EXPECT_EQ(*swapped.gamma, 0.01);
}

TEST(RunConfig, Validation) {
  EXPECT_THROW(resolve_config("chern", json{{"Vzero", 1}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"N", 1}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"Ng", 3}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"B", -1.0}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"theta", 1.5}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"N", "eight"}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"V0", 1}, {"gamma", 1}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("chern", json{{"command", "bands"}}, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("fly", nullptr, nullptr), ConfigError);
  EXPECT_THROW(resolve_config("jstudy", json{{"J", {10.0, -1.0}}}, nullptr), ConfigError);
}

TEST(RunConfig, CommandDefaults) {
  const auto j = with_command_defaults(resolve_config("jstudy", nullptr, nullptr));
  EXPECT_EQ(*j.N, 6);
  EXPECT_EQ(*j.Nw, 12);
  EXPECT_EQ(j.bands, (std::vector<int>{1, 2, 3}));
  const auto d = with_command_defaults(resolve_config("dirac", json{{"ell", 2}}, nullptr));
  EXPECT_NEAR(*d.B, 5 * std::numbers::pi, 1e-15);
  const auto c = with_command_defaults(resolve_config("curvature", nullptr, nullptr));
  EXPECT_EQ(*c.theta, 0.5);
  EXPECT_EQ(c.output, "curvature.csv");
  EXPECT_THROW(with_command_defaults(resolve_config("dirac", json{{"B", 1.0}}, nullptr)), ConfigError);
}

TEST_F(RunTest, BandsCsvAndManifest) {
  auto cfg = config("bands", {{"V0", 0.1}, {"grid", 3}, {"N", 3}, {"output", path("b.csv")}});
  std::ostringstream log;
  const auto out = run(cfg, log);
  ASSERT_EQ(out.exit_code, 0) << log.str();
  const std::string csv = slurp(path("b.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k1,k2,E1,E2,E3,E4,E5,E6,E7,E8");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);

  const auto m = json::parse(slurp(path("b.csv.manifest.json")));
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["version"], kVersion);
  EXPECT_EQ(m["config"]["N"], 3);
  EXPECT_EQ(m["config"]["N1"], 3);
  EXPECT_TRUE(m.contains("timestamp"));

  // Re-running reproduces the data byte for byte.
  ASSERT_EQ(run(cfg, log).exit_code, 0);
  EXPECT_EQ(slurp(path("b.csv")), csv);
}

TEST_F(RunTest, ChernJson) {
  const auto cfg = config("chern", {{"gamma", 0.1}, {"N", 4}, {"Ng", 8}, {"bands", {2, 3}}, {"output", path("c.json")}});
  std::ostringstream log;
  ASSERT_EQ(run(cfg, log).exit_code, 0) << log.str();
  const auto j = json::parse(slurp(path("c.json")));
  EXPECT_EQ(j["chern"], 2);
  EXPECT_GT(j["min_gap"].get<double>(), 0.0);
}

TEST_F(RunTest, GapClosureIsNumericalFailure) {
  const auto cfg = config("chern", {{"V0", 0.0}, {"N", 3}, {"Ng", 4}, {"output", path("c.json")}});
  std::ostringstream log;
  const auto out = run(cfg, log);
  EXPECT_EQ(out.exit_code, 2);
  const auto m = json::parse(slurp(path("c.json.manifest.json")));
  EXPECT_EQ(m["status"], "numerical_failure");
  EXPECT_EQ(m["reason"], "gap_closure");
}

TEST_F(RunTest, OtherCommandsWriteOutputs) {
  std::ostringstream log;
  const std::vector<std::pair<std::string, json>> cases{
      {"gap-scan", {{"V0", 0.1}, {"B_min", 5.0}, {"B_max", 6.0}, {"steps", 2}, {"N", 3}}},
      {"curvature", {{"gamma", 0.1}, {"N", 4}, {"Ng", 8}}},
      {"dirac", {{"gamma", 0.05}, {"N", 4}}},
      {"jstudy", {{"N", 2}, {"Nw", 4}, {"J", {20.0, 40.0}}, {"bands", {1}}}},
      {"overlap", {{"samples", 3}, {"Nw", 40}}},
      {"symmetry", {{"gamma", 0.1}, {"N", 4}}}};
  for (auto [cmd, flags] : cases) {
    flags["output"] = path(cmd + ".out");
    const auto out = run(config(cmd, flags), log);
    EXPECT_EQ(out.exit_code, 0) << cmd << ": " << log.str();
    EXPECT_TRUE(fs::exists(path(cmd + ".out"))) << cmd;
    EXPECT_EQ(json::parse(slurp(path(cmd + ".out.manifest.json")))["status"], "ok") << cmd;
  }
  auto header = [&](const std::string& name) {
    const std::string s = slurp(path(name));
    return s.substr(0, s.find('\n'));
  };
  EXPECT_EQ(header("gap-scan.out"), "B,g_numeric,g_perturbative,k1_min,k2_min");
  EXPECT_EQ(header("jstudy.out"), "J,band,E_full,E_eff,abs_diff");
  EXPECT_EQ(header("curvature.out"), "k1,k2,curvature");
  EXPECT_EQ(json::parse(slurp(path("curvature.out.manifest.json")))["results"]["normalization"], "per-area");
  EXPECT_EQ(header("overlap.out"), "k1,k2,k1p,k2p,re_numeric,im_numeric,re_closed,im_closed,deviation");
}

TEST_F(RunTest, CliExitCodes) {
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli("chern --N 1 --output " + path("x.json")), 1);
  EXPECT_EQ(cli("chern --Ng 2"), 1);
  EXPECT_EQ(cli("bands --theta 2"), 1);
  EXPECT_EQ(cli("nonsense"), 1);
  EXPECT_EQ(cli("chern --config " + path("missing.json")), 1);

  std::ofstream(path("bad.json")) << R"({"N": 3, "colour": "red"})";
  EXPECT_EQ(cli("bands --config " + path("bad.json")), 1);

  std::ofstream(path("good.json")) << R"({"N": 9, "grid": 2, "V0": 0.1})";
  ASSERT_EQ(cli("bands --config " + path("good.json") + " --N 3 --output " + path("b.csv")), 0);
  const auto m = json::parse(slurp(path("b.csv.manifest.json")));
  EXPECT_EQ(m["config"]["N"], 3);
  EXPECT_EQ(m["config"]["grid"], 2);

  EXPECT_EQ(cli("chern --V0 0 --N 3 --Ng 4 --output " + path("c.json")), 2);
  EXPECT_EQ(cli("chern --gamma 0.1 --N 4 --Ng 8 --bands 2,3 --output " + path("c.json")), 0);
  EXPECT_EQ(json::parse(slurp(path("c.json")))["chern"], 2);
}
