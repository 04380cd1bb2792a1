#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SCMODE_TOOL) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("scmode_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::string shipped(const std::string& name) {
  return (fs::path(SCMODE_SCENARIO_DIR) / (name + ".scenario")).string();
}

}  // namespace

TEST_F(CliTest, ListShowsShippedScenarios) {
  const auto r = run("list-scenarios");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("fig3c"), std::string::npos);
  EXPECT_NE(r.out.find("herald_flat"), std::string::npos);
}

TEST_F(CliTest, ValidateAcceptsShippedAndRejectsBadFiles) {
  EXPECT_EQ(run("validate " + shipped("fig3c")).status, 0);
  const auto bad = write("bad.scenario", "[run]\ndirective = noise-budget\n[budget]\n[chain]\nefficiencies = 1.2\n");
  const auto r = run("validate " + bad.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("each efficiency must lie in (0, 1]"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsAFailure) {
  EXPECT_EQ(run("run " + (dir_ / "nope.scenario").string()).status, 1);
}

TEST_F(CliTest, RunWritesCsvAndSummary) {
  const auto r = run("run " + shipped("budget_noisemod") + " --out " + dir_.string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("predicted_level_additive"), std::string::npos);
  const auto csv = slurp(dir_ / "budget_noisemod.csv");
  EXPECT_EQ(csv.rfind("quantity,", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "budget_noisemod.summary.txt"));
}

TEST_F(CliTest, SeedOverrideChangesStochasticOutput) {
  const auto path = shipped("single_ase");
  ASSERT_EQ(run("run " + path + " --out " + (dir_ / "a").string()).status, 0);
  ASSERT_EQ(run("run " + path + " --out " + (dir_ / "b").string()).status, 0);
  ASSERT_EQ(run("run " + path + " --seed 99 --out " + (dir_ / "c").string()).status, 0);
  const auto a = slurp(dir_ / "a" / "single_ase.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "single_ase.csv"));
  EXPECT_NE(a, slurp(dir_ / "c" / "single_ase.csv"));
}

TEST_F(CliTest, CalibrationFailureExitsWithThree) {
  const auto p = write("unreachable.scenario",
                       "[run]\ndirective = calibrate-raman\n[calibration]\n"
                       "target_squeeze_db = 30\ntarget_antisqueeze_db = 22\nhalf_bins = 2\n"
                       "[fiber]\nsegments = 8\nphase_matching = broadband\n");
  const auto r = run("run " + p.string() + " --out " + dir_.string());
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("unreachable"), std::string::npos);
}

TEST_F(CliTest, BadFlagsAreRejected) {
  EXPECT_NE(run("run " + shipped("fig3c") + " --segments 0").status, 0);
  EXPECT_NE(run("").status, 0);
}
