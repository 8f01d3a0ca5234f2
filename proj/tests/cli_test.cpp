#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(MESHFLOOD_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("meshflood_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path scenario(const std::string& name, const std::string& body) {
    auto p = dir / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir;
};

TEST_F(Cli, RunBridgedStarDumpsTheThreeRelays) {
  auto scn = scenario("fig3.scn", "fixture = fig3\n");
  auto r = cli("run " + scn.string() + " --mode=relay --dump-relays --dump-topology --out " + (dir / "o").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(dir / "o" / "relays.txt"),
            "relay 1 selectors 0 2 3 4 5\nrelay 2 selectors 0 1 3 6 7\nrelay 3 selectors 0 1 2 8 9\n");
  EXPECT_TRUE(fs::exists(dir / "o" / "series.csv"));
  EXPECT_TRUE(fs::exists(dir / "o" / "topology.txt"));
  EXPECT_NE(slurp(dir / "o" / "summary.txt").find("total_transmissions=600\n"), std::string::npos);
}

TEST_F(Cli, MissingScenarioIsConfigError) {
  EXPECT_EQ(cli("run " + (dir / "missing.scn").string()).code, 2);
  auto bad = scenario("bad.scn", "colour = blue\n");
  EXPECT_EQ(cli("run " + bad.string()).code, 2);
  EXPECT_EQ(cli("run fig3 --mode sideways").code, 2);
}

TEST_F(Cli, SeededRunsAreByteIdentical) {
  auto scn = scenario("grid25.scn", "node_count = 25\nplacement = uniform\nradio_range = 140\n");
  ASSERT_EQ(cli("run " + scn.string() + " --seed 7 --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(cli("run " + scn.string() + " --seed 7 --out " + (dir / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "series.csv"), slurp(dir / "b" / "series.csv"));
  EXPECT_EQ(slurp(dir / "a" / "summary.txt"), slurp(dir / "b" / "summary.txt"));
  EXPECT_NE(slurp(dir / "a" / "summary.txt").find("config.seed=7\n"), std::string::npos);
}

TEST_F(Cli, CompareCompleteGraph) {
  ASSERT_EQ(cli("compare k:4 --out " + dir.string()).code, 0);
  const auto text = slurp(dir / "compare.txt");
  EXPECT_NE(text.find("transmission_reduction_pct=75.000000\n"), std::string::npos) << text;
  EXPECT_TRUE(fs::exists(dir / "relay" / "series.csv"));
  EXPECT_TRUE(fs::exists(dir / "blind" / "series.csv"));
}

TEST_F(Cli, CompareSingleNodeIsZero) {
  ASSERT_EQ(cli("compare k:1 --out " + dir.string()).code, 0);
  EXPECT_NE(slurp(dir / "compare.txt").find("transmission_reduction_pct=0.000000\n"), std::string::npos);
}

TEST_F(Cli, CompareGridIsPositive) {
  auto r = cli("compare grid:25 --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  const auto text = slurp(dir / "compare.txt");
  const auto pos = text.find("transmission_reduction_pct=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GT(std::stod(text.substr(pos + 27)), 0.0);
}

TEST_F(Cli, OracleSmallCases) {
  auto r = cli("oracle path:3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "heuristic=1\noptimal=1\nratio=1.000000\n");
  r = cli("oracle k:4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "heuristic=0\noptimal=0\nratio=1.000000\n");
}

TEST_F(Cli, OracleRandomTenNodes) {
  auto scn = scenario("r10.scn", "node_count = 10\nradio_range = 220\nseed = 11\n");
  auto r = cli("oracle " + scn.string());
  ASSERT_EQ(r.code, 0);
  const auto pos = r.out.find("ratio=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(r.out.substr(pos + 6)), 1.0);
}

TEST_F(Cli, OracleSizeLimit) {
  EXPECT_EQ(cli("oracle grid:25").code, 2);
  EXPECT_EQ(cli("oracle path:5 --max-n 4").code, 2);
}

TEST_F(Cli, BatchSeedsWriteIsolatedDirectories) {
  ASSERT_EQ(cli("run grid:9 --seeds 1-3 --jobs 2 --out " + dir.string()).code, 0);
  for (int s = 1; s <= 3; ++s) {
    const auto summary = slurp(dir / ("seed_" + std::to_string(s)) / "summary.txt");
    EXPECT_NE(summary.find("config.seed=" + std::to_string(s) + "\n"), std::string::npos);
  }
}

TEST_F(Cli, FlagsOverrideFileValues) {
  auto scn = scenario("s.scn", "fixture = path:4\nrule2 = on\nmode = relay\n");
  ASSERT_EQ(cli("run " + scn.string() + " --rule2 off --mode blind --inflight drop --out " + dir.string()).code, 0);
  const auto summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("config.rule2=off\n"), std::string::npos);
  EXPECT_NE(summary.find("config.mode=blind\n"), std::string::npos);
  EXPECT_NE(summary.find("config.inflight=drop\n"), std::string::npos);
}

}  // namespace
