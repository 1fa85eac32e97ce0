#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "gtest/gtest.h"
#include "steuler/config.hpp"
#include "steuler/output.hpp"

namespace steuler {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("steuler_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STEULER_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, EmptyFileGivesDefaults) {
  const RunSettings s = parse_config_text("", RunSettings{});
  EXPECT_EQ(s.n, 8);
  EXPECT_EQ(s.dt, 1e-3);
  EXPECT_EQ(s.T, 1.0);
  EXPECT_EQ(s.paths, 256);
  EXPECT_EQ(s.beta, 4.0);
  EXPECT_TRUE(s.validate().empty());
  const SimConfig c = s.resolve();
  EXPECT_EQ(c.scheme, Scheme::StratImplicitMidpoint);
  EXPECT_EQ(c.noise.regime(), NoiseRegime::SpaceIndependent);
  EXPECT_EQ(c.steps(), 1000);
}

TEST(Config, ParsesKeysAndComments) {
  const RunSettings s = parse_config_text(
      "# desk run\n n = 4 \ndt=2e-3  # coarser\nscheme = ito-em\nnoise = qwiener:3\n\nic = random:2\n",
      RunSettings{});
  EXPECT_EQ(s.n, 4);
  EXPECT_EQ(s.dt, 2e-3);
  EXPECT_EQ(s.scheme, "ito-em");
  const SimConfig c = s.resolve();
  EXPECT_EQ(c.noise.regime(), NoiseRegime::QWiener);
  EXPECT_EQ(c.noise.n_w(), 3);
  EXPECT_EQ(c.initial.kind, InitialCondition::Kind::Random);
}

TEST(Config, RejectsBetaAtMostThree) {
  RunSettings s;
  s.beta = 2.5;
  const auto errs = s.validate();
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs[0].find("beta must be > 3"), std::string::npos);
  EXPECT_THROW(s.resolve(), ConfigError);
  s.beta = 3.0;
  EXPECT_FALSE(s.validate().empty());
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_config_text("n = 4\n\nbogus = 1\n", RunSettings{}, "run.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:3:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("n 4\n", RunSettings{}), ConfigError);
  EXPECT_THROW(parse_config_text("dt = fast\n", RunSettings{}), ConfigError);
  EXPECT_THROW(parse_config_text("paths = 12x\n", RunSettings{}), ConfigError);
}

TEST(Config, ValidationListsEveryViolation) {
  RunSettings s;
  s.beta = 1.0;
  s.dt = -1.0;
  s.paths = 0;
  s.scheme = "rk4";
  s.noise = "white";
  const auto errs = s.validate();
  EXPECT_GE(errs.size(), 5u);
  try {
    s.resolve();
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto* word : {"beta", "dt", "paths", "rk4", "white"})
      EXPECT_NE(msg.find(word), std::string::npos) << word;
  }
}

TEST(Config, TimeMustBeMultipleOfStep) {
  RunSettings s;
  s.T = 1.0005;
  s.dt = 1e-3;
  EXPECT_FALSE(s.validate().empty());
}

TEST(Config, NoiseSpecs) {
  EXPECT_EQ(parse_noise("space-independent", 4, 64).regime(), NoiseRegime::SpaceIndependent);
  const auto f = parse_noise("finite:1,0;0,-2", 4, 64);
  EXPECT_EQ(f.regime(), NoiseRegime::FiniteModes);
  EXPECT_EQ(f.modes().size(), 2u);
  EXPECT_THROW(parse_noise("finite:", 4, 64), ConfigError);
  EXPECT_THROW(parse_noise("qwiener:x", 4, 64), ConfigError);
  EXPECT_THROW(parse_noise("colored", 4, 64), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  RunSettings s;
  s.n = 3;
  s.seed = 0xFFFFFFFFFFFFull;
  s.noise = "qwiener:2";
  s.ic = "mode:S1,2";
  const RunSettings back = RunSettings::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
  RunManifest m{"ensemble", s, {"ensemble.csv"}, utc_timestamp(), utc_timestamp(), 0.5};
  const auto j = m.to_json();
  EXPECT_EQ(j.at("version").get<std::string>(), STEULER_VERSION);
  EXPECT_EQ(j.at("noise").at("regime").get<std::string>(), "qwiener");
  EXPECT_GT(j.at("noise").at("c_W").get<double>(), 1.0);
  EXPECT_EQ(RunSettings::from_json(j.at("settings")).to_json(), s.to_json());
}

TEST(Config, EnvironmentSetsOutputDir) {
  ::setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
  EXPECT_EQ(RunSettings::defaults().out, "/tmp/elsewhere");
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(RunSettings::defaults().out, "steuler-out");
}

TEST(Output, EnsembleHeader) {
  SimConfig c;
  c.n = 2;
  c.paths = 2;
  c.T = 0.01;
  c.save_every = 5;
  std::ostringstream os;
  write_ensemble_csv(os, run_ensemble(c, default_probes(2)));
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,mean_L2,se_L2,mean_H1,se_H1,envelope_H1,mean_M,se_M,qv_gap,se_qv");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Cli, TablesAreAntisymmetric) {
  const fs::path dir = scratch_dir("tables");
  ASSERT_EQ(run_cli("tables --n 2 --out " + dir.string()), 0);
  std::ifstream f(dir / "structure.csv");
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "k,l,m,value");
  std::map<std::tuple<int, int, int>, double> c;
  while (std::getline(f, line)) {
    int k, l, m;
    double v;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%d,%lf", &k, &l, &m, &v), 4);
    c[{k, l, m}] = v;
  }
  ASSERT_FALSE(c.empty());
  for (const auto& [key, v] : c) {
    const auto [k, l, m] = key;
    const auto it = c.find({l, k, m});
    ASSERT_NE(it, c.end());
    EXPECT_EQ(v + it->second, 0.0);
  }
  EXPECT_TRUE(fs::exists(dir / "christoffel.csv"));
  EXPECT_TRUE(fs::exists(dir / "modes.csv"));
}

TEST(Cli, EnsembleWritesCsvAndReplays) {
  const fs::path dir = scratch_dir("ensemble");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "n = 3\nT = 0.02\npaths = 64\nsave_every = 5\n";
  ASSERT_EQ(run_cli("ensemble --config " + cfg.string() + " --paths 4 --out " + (dir / "a").string()), 0);
  const std::string csv = slurp(dir / "a" / "ensemble.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "t,mean_L2,se_L2,mean_H1,se_H1,envelope_H1,mean_M,se_M,qv_gap,se_qv");
  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest.at("settings").at("paths"), 4);  // flag beats file
  EXPECT_EQ(manifest.at("settings").at("n"), 3);

  // Replaying the manifest into another directory reproduces the outputs.
  ASSERT_EQ(run_cli("ensemble --config " + (dir / "a" / "manifest.json").string() + " --out " +
                    (dir / "b").string()),
            0);
  for (const auto* name : {"ensemble.csv", "paths.csv", "probe_S10.csv"})
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
}

TEST(Cli, RunWritesPath) {
  const fs::path dir = scratch_dir("run");
  ASSERT_EQ(run_cli("run --n 2 --T 0.01 --scheme strat-heun --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "path.csv"));
  EXPECT_TRUE(fs::exists(dir / "states.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, ConfigErrorsExitNonzero) {
  const fs::path dir = scratch_dir("bad");
  EXPECT_EQ(run_cli("ensemble --beta 2.5 --out " + dir.string()), 2);
  EXPECT_NE(run_cli("verify --suite nonsense"), 0);
}

TEST(Cli, VerifyNoiseQuick) { EXPECT_EQ(run_cli("verify --suite noise --quick"), 0); }

}  // namespace
}  // namespace steuler
