#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "povmc/serialize.hpp"

using povmc::io::json;

namespace {

const std::string kCli = POVMC_CLI;
const std::string kFixtures = POVMC_FIXTURES;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run(const std::string& args) {
  const std::string base = ::testing::TempDir() + "povmc_cli_" +
                            ::testing::UnitTest::GetInstance()->current_test_info()->name();
  const std::string cmd = kCli + " " + args + " > " + base + ".out 2> " + base + ".err";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(base + ".out");
  r.err = slurp(base + ".err");
  return r;
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

}  // namespace

TEST(Cli, ValidateAcceptsFixtures) {
  for (const char* f : {"qubit_xz.json", "qubit_xyz.json", "commuting_pair.json", "qubit_xz_assemblage.json",
                        "amplitude_damping.json", "parent_model.json", "lhs_model.json",
                        "embedded_qubit_pair.json", "cv_scan_small.json", "cv_scan_default.json"}) {
    const CliRun r = run("validate --input " + fixture(f));
    EXPECT_EQ(r.code, 0) << f << ": " << r.err;
  }
}

TEST(Cli, ValidateReportsPointer) {
  const CliRun r = run("validate --input " + fixture("malformed_povm.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("\"/povms/0/1\""), std::string::npos) << r.err;
  const CliRun s = run("validate --input " + fixture("malformed_syntax.json"));
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.err.find("schema error"), std::string::npos) << s.err;
}

TEST(Cli, JmVerdicts) {
  const CliRun compatible = run("jm --input " + fixture("commuting_pair.json"));
  ASSERT_EQ(compatible.code, 0) << compatible.err;
  EXPECT_EQ(json::parse(compatible.out).at("type"), "result");
  const CliRun incompatible = run("jm --input " + fixture("qubit_xz.json"));
  EXPECT_EQ(incompatible.code, 0) << incompatible.err;
  EXPECT_NE(incompatible.out, compatible.out);
}

TEST(Cli, RobustnessValue) {
  const CliRun r = run("robustness --input " + fixture("qubit_xz.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.7071"), std::string::npos);
}

TEST(Cli, RefusalAtCap) {
  const CliRun r = run("jm --cap 2 --input " + fixture("qubit_xyz.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("refused"), std::string::npos) << r.err;
}

TEST(Cli, CompressNeedsSeed) {
  EXPECT_EQ(run("compress --n 2 --input " + fixture("embedded_qubit_pair.json")).code, 1);
}

TEST(Cli, CompressHeuristicIsDeterministic) {
  const std::string args = "compress --n 2 --seed 5 --restarts 1 --input " + fixture("embedded_qubit_pair.json");
  const CliRun a = run(args);
  const CliRun b = run(args);
  EXPECT_EQ(a.code, 2) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(Cli, CompressTrivialDimension) {
  const CliRun r = run("compress --n 3 --input " + fixture("embedded_qubit_pair.json"));
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ChoiRoundTrip) {
  const CliRun fwd = run("choi --input " + fixture("amplitude_damping.json"));
  ASSERT_EQ(fwd.code, 0) << fwd.err;
  const std::string tmp = ::testing::TempDir() + "povmc_choi.json";
  std::ofstream(tmp) << json::parse(fwd.out).at("choi").dump();
  const CliRun back = run("choi --input " + tmp);
  ASSERT_EQ(back.code, 0) << back.err;
  EXPECT_EQ(json::parse(back.out).at("kraus_channel").at("type"), "kraus_channel");
}

TEST(Cli, CvscanCsvColumns) {
  const std::string args = "cvscan --format csv --seed 1 --input " + fixture("cv_scan_small.json");
  const CliRun a = run(args);
  ASSERT_EQ(a.code, 2) << a.err;
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "d,bins,eta_star,seesaw_n,visibility,cert_status");
  std::istringstream in(a.out);
  std::string line;
  while (std::getline(in, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5) << line;
  EXPECT_EQ(run(args).out, a.out);
}

TEST(Cli, CsvOnlyForScan) {
  EXPECT_EQ(run("jm --format csv --input " + fixture("qubit_xz.json")).code, 1);
}

TEST(Cli, MissingSubcommandFails) {
  EXPECT_NE(run("").code, 0);
}
