#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "diqpq/commands.hpp"

using namespace diqpq;
namespace fs = std::filesystem;

namespace {

std::string run_to_string(const RunManifest& m, int* status = nullptr) {
  std::ostringstream os;
  const int rc = dispatch(m, os);
  if (status) *status = rc;
  return os.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DIQPQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "diqpq_test_commands";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Manifest, RejectsBadValues) {
  RunManifest m;
  m.theta = 2.0;
  EXPECT_THROW(m.resolve(), ConfigError);
  m = RunManifest{};
  m.trials = 0;
  EXPECT_THROW(m.resolve(), ConfigError);
  m = RunManifest{};
  m.config.gamma = 0.6;
  EXPECT_THROW(m.resolve(), ConfigError);
  m = RunManifest{};
  m.command = Command::Attack;
  m.attack = "eve";
  EXPECT_THROW(run_to_string(m), ConfigError);
}

TEST(Run, LargerConfigCompletes) {
  RunManifest m;
  m.config.gamma = 0.25;
  m.config.K = 4800;
  m.config.k = 2;
  m.config.N = 1200;
  int rc = -1;
  const auto rep = ordered_json::parse(run_to_string(m, &rc));
  EXPECT_EQ(rc, kExitOk);
  EXPECT_TRUE(rep["queries"][0]["correct"].get<bool>());
  EXPECT_EQ(rep["queries"][0]["pairs"]["total"].get<std::size_t>(), 4800u);
  EXPECT_EQ(rep["config"]["seed"].get<std::uint64_t>(), 1u);
}

TEST(Run, SameSeedByteIdentical) {
  RunManifest m;
  m.queries = 3;
  m.config.seed = 1234;
  const fs::path dir = scratch_dir();
  m.transcript_path = (dir / "t1.jsonl").string();
  const std::string a = run_to_string(m);
  m.transcript_path = (dir / "t2.jsonl").string();
  const std::string b = run_to_string(m);
  EXPECT_EQ(a, b);
  EXPECT_EQ(slurp(dir / "t1.jsonl"), slurp(dir / "t2.jsonl"));
  EXPECT_FALSE(slurp(dir / "t1.jsonl").empty());
  m.config.seed = 1235;
  EXPECT_NE(run_to_string(m), a);
}

TEST(Run, AbortGivesExitThree) {
  RunManifest m;
  m.config.devices.chsh.uniform_outputs = true;
  int rc = -1;
  const auto rep = ordered_json::parse(run_to_string(m, &rc));
  EXPECT_EQ(rc, kExitProtocolAbort);
  EXPECT_EQ(rep["queries"][0]["aborted"].get<std::string>(), "chsh-alice-referee");
}

TEST(Chsh, ReportsBothReferees) {
  RunManifest m;
  m.command = Command::Chsh;
  m.trials = 20000;
  int rc = -1;
  const auto rep = ordered_json::parse(run_to_string(m, &rc));
  EXPECT_EQ(rc, kExitOk);
  EXPECT_NEAR(rep["alice_referee"]["z"].get<double>(), 0.8536, 0.02);
  EXPECT_EQ(rep["bob_referee"]["first_announcer"].get<std::string>(), "Alice");
}

TEST(Attack, HelstromRespectsBoundMiddleFlagged) {
  RunManifest m;
  m.command = Command::Attack;
  m.trials = 20000;
  int rc = -1;
  auto rep = ordered_json::parse(run_to_string(m, &rc));
  EXPECT_EQ(rc, kExitOk);
  EXPECT_TRUE(rep["report"]["respects_bound"].get<bool>());
  m.attack = "bob-middle";
  rep = ordered_json::parse(run_to_string(m, &rc));
  EXPECT_EQ(rc, kExitOk);
  EXPECT_FALSE(rep["report"]["correctness_preserved"].get<bool>());
  EXPECT_EQ(rep["report"]["inconclusive_count"].get<std::size_t>(), 0u);
}

TEST(Bounds, Summary) {
  RunManifest m;
  m.command = Command::Bounds;
  m.queries = 5;
  const auto rep = ordered_json::parse(run_to_string(m));
  EXPECT_NEAR(rep["summary"]["data_privacy_entropy"].get<double>(), 20.00627460940165, 1e-12);
  EXPECT_NEAR(rep["summary"]["user_privacy_entropy"].get<double>(), 10.0, 1e-12);
}

TEST(Sweep, SinglePointAtRightAngle) {
  RunManifest m;
  m.command = Command::Sweep;
  m.single_theta = true;
  m.theta = std::numbers::pi / 2;
  const auto l = lines(run_to_string(m));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "theta,conclusive,helstrom,lambda,delta");
  EXPECT_EQ(l[1], "1.5707963267948966,1,1,0,0");
}

TEST(Sweep, DefaultGridMonotone) {
  RunManifest m;
  m.command = Command::Sweep;
  const auto l = lines(run_to_string(m));
  ASSERT_EQ(l.size(), 51u);
  double prev_c = -1, prev_h = -1;
  for (std::size_t i = 1; i < l.size(); ++i) {
    double t, c, h, lam, d;
    ASSERT_EQ(std::sscanf(l[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &c, &h, &lam, &d), 5);
    EXPECT_GE(c, prev_c);
    EXPECT_GE(h, prev_h);
    prev_c = c;
    prev_h = h;
  }
}

TEST(Sweep, EmpiricalColumnsAndThreadInvariance) {
  RunManifest m;
  m.command = Command::Sweep;
  m.grid_points = 5;
  m.empirical = true;
  m.trials = 100000;
  int rc = -1;
  const std::string one = run_to_string(m, &rc);
  EXPECT_EQ(rc, kExitOk);
  m.threads = 3;
  EXPECT_EQ(run_to_string(m), one);
  const auto l = lines(one);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[0], "theta,conclusive,helstrom,lambda,delta,conclusive_mc,helstrom_mc");
  for (std::size_t i = 1; i < l.size(); ++i) {
    double t, c, h, lam, d, cm, hm;
    ASSERT_EQ(std::sscanf(l[i].c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &t, &c, &h, &lam, &d, &cm,
                          &hm),
              7);
    EXPECT_NEAR(cm, c, 0.01);
    EXPECT_NEAR(hm, h, 0.01);
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("bounds"), 0);
  EXPECT_EQ(run_cli("run --gamma 0.6"), 2);
  EXPECT_EQ(run_cli("run --N 99"), 2);
  EXPECT_EQ(run_cli("attack --attack eve"), 2);
  EXPECT_EQ(run_cli("attack --trials 0"), 2);
  EXPECT_EQ(run_cli("chsh --trials 2000 --chsh-uniform"), 3);
  EXPECT_EQ(run_cli("sweep --grid-points 3"), 0);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, ConfigFileAndOverride) {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "exp.cfg";
  {
    std::ofstream f(cfg);
    f << "theta = 1.5707963267948966\nk = 2\nN = 100\nK = 1000\ngamma = 0.4\nseed = 5\n";
  }
  const fs::path out = dir / "bounds.json";
  ASSERT_EQ(run_cli("bounds --config " + cfg.string() + " --out " + out.string()), 0);
  auto rep = ordered_json::parse(slurp(out));
  EXPECT_EQ(rep["summary"]["data_privacy_entropy"].get<double>(), 0.0);
  EXPECT_EQ(rep["config"]["seed"].get<std::uint64_t>(), 5u);
  ASSERT_EQ(run_cli("bounds --config " + cfg.string() + " --theta 1.0471975511965976 --out " +
                    out.string()),
            0);
  rep = ordered_json::parse(slurp(out));
  EXPECT_NEAR(rep["summary"]["data_privacy_entropy"].get<double>(), 20.00627460940165, 1e-12);
}
