#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "predprey/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("predprey_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the binary with stdout/stderr captured into files under dir_.
  int run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" PREDPREY_CLI "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& rel) const {
    std::ifstream in(dir_ / rel, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const fs::path& rel, const std::string& text) const { std::ofstream(dir_ / rel) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ResponsesTable) {
  ASSERT_EQ(run("responses --preset holling2 --grid 0.5,1,2 --out r"), 0) << read("stderr.txt");
  const std::string csv = read("r/responses.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,phi,psi");
  const double expected[] = {1.0 / 3.0, 0.5, 2.0 / 3.0};
  for (double e : expected) {
    ASSERT_TRUE(std::getline(in, line));
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    EXPECT_NEAR(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), e, 1e-15) << line;
  }
  EXPECT_TRUE(fs::exists(dir_ / "r/assumptions.json"));
  EXPECT_TRUE(fs::exists(dir_ / "r/config.json"));
}

TEST_F(Cli, OdeConservesLotkaVolterraInvariant) {
  ASSERT_EQ(run("ode --preset lotka_volterra --T 50 --out o"), 0) << read("stderr.txt");
  const auto eq = json::parse(read("o/equilibria.json"));
  const auto& c = eq.at("conservation");
  EXPECT_LE(c.at("max_drift").get<double>(), 1e-6 * (1.0 + std::abs(c.at("L0").get<double>())));
  EXPECT_FALSE(eq.at("aborted").get<bool>());
  EXPECT_EQ(read("o/ode.csv").substr(0, 4), "t,x,");
}

TEST_F(Cli, ConfigErrorsExitWithOne) {
  EXPECT_EQ(run("simulate --preset holling2 --T 1"), 1);
  EXPECT_NE(read("stderr.txt").find(".scaling"), std::string::npos) << read("stderr.txt");
  EXPECT_EQ(run("simulate --preset holling2 --K1 100 --K2 10"), 1);
  EXPECT_NE(read("stderr.txt").find(".simulate.T: required"), std::string::npos) << read("stderr.txt");
  EXPECT_EQ(run("responses --preset holling2 --param k=1 --json-errors"), 1);
  const auto err = json::parse(read("stderr.txt"));
  EXPECT_EQ(err.at("error").at("kind"), "config");
  EXPECT_NE(err.at("error").at("message").get<std::string>().find(".model.params.k"), std::string::npos);
  EXPECT_EQ(run("responses --bogus-flag"), 1);
  EXPECT_EQ(run("ode --config missing.json"), 1);
}

TEST_F(Cli, RuntimeFailuresExitWithTwo) {
  write("c.json", R"({"command": "simulate", "model": {"preset": "holling2"}, "scaling": {"K1": 1000, "K2": 100},
                      "simulate": {"T": 1, "max_population": 10}})");
  EXPECT_EQ(run("simulate --config c.json --out c --json-errors"), 2);
  const auto err = json::parse(read("stderr.txt"));
  EXPECT_EQ(err.at("error").at("kind"), "runtime");
}

TEST_F(Cli, SimulateIsByteReproducible) {
  const std::string args = "simulate --preset holling2 --K1 500 --K2 50 --T 1 --replicas 3 --threads 2";
  ASSERT_EQ(run(args + " --seed 7 --out a"), 0) << read("stderr.txt");
  ASSERT_EQ(run(args + " --seed 7 --out b"), 0) << read("stderr.txt");
  for (const char* f : {"trajectory.csv", "occupation.json", "events.json", "summary.csv"}) {
    const std::string a = read(fs::path("a") / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, read(fs::path("b") / f)) << f;
  }
  ASSERT_EQ(run(args + " --seed 8 --out c"), 0);
  EXPECT_NE(read("a/trajectory.csv"), read("c/trajectory.csv"));
}

TEST_F(Cli, DumpConfigReparses) {
  ASSERT_EQ(run("study --preset holling2 --T 1 --ladder 100:10,1000:20 --replicas 2 --dump-config"), 0);
  const auto cfg = predprey::parse_config_text(read("stdout.txt"));
  EXPECT_EQ(cfg.command, predprey::Command::Study);
  EXPECT_EQ(cfg.study.ladder.size(), 2u);
  EXPECT_EQ(cfg.study.replicas, 2u);
  // Feeding the dump back in reproduces it.
  write("dumped.json", read("stdout.txt"));
  const std::string first = read("stdout.txt");
  ASSERT_EQ(run("study --config dumped.json --dump-config"), 0);
  EXPECT_EQ(read("stdout.txt"), first);
}

TEST_F(Cli, StudyWritesReport) {
  ASSERT_EQ(run("study --preset holling2 --T 0.5 --ladder 100:10,400:20 --replicas 2 --out s"), 0)
      << read("stderr.txt");
  const auto rep = json::parse(read("s/study.json"));
  EXPECT_EQ(rep.at("rungs").size(), 2u);
  const std::string csv = read("s/study.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
