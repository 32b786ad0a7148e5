#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const fs::path kRoot = fs::temp_directory_path() / "pfmc_test_cli";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" PFMC_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string dir(const std::string& name) { return (kRoot / name).string(); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
  void TearDown() override { fs::remove_all(kRoot); }
};

TEST_F(Cli, SuccessWritesArtifactsAndManifest) {
  ASSERT_EQ(run("toy-gaussian --K 3 --N 20 --R 5 --out " + dir("toy")), 0);
  EXPECT_TRUE(fs::exists(kRoot / "toy" / "manifest.json"));
  EXPECT_TRUE(fs::exists(kRoot / "toy" / "toy_gaussian.csv"));
  const auto m = nlohmann::json::parse(slurp(kRoot / "toy" / "manifest.json"));
  EXPECT_EQ(m["experiment"], "toy-gaussian");
  EXPECT_EQ(m["config"]["K"], 3);
}

TEST_F(Cli, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("toy-gaussian --no-such-flag"), 2);
  EXPECT_EQ(run("toy-gaussian --N 0 --out " + dir("zero")), 2);
  std::ofstream(kRoot / "unknown.json") << R"({"K": 3, "bogus": true})";
  EXPECT_EQ(run("toy-gaussian --config " + dir("unknown.json") + " --out " + dir("u")), 2);
  std::ofstream(kRoot / "broken.json") << "{ not json";
  EXPECT_EQ(run("toy-gaussian --config " + dir("broken.json") + " --out " + dir("b")), 2);
  EXPECT_EQ(run("toy-gaussian --config " + dir("missing.json") + " --out " + dir("m")), 2);
  EXPECT_EQ(run("hierarchical --methods Gibbs,NUTS --out " + dir("h")), 2);
}

TEST_F(Cli, ConfigFileAndFlagOverride) {
  std::ofstream(kRoot / "cfg.json") << R"({"K": 3, "N": 20, "R": 5, "seed": 4})";
  ASSERT_EQ(run("toy-gaussian --config " + dir("cfg.json") + " --K 2 --out " + dir("cfg")), 0);
  const auto m = nlohmann::json::parse(slurp(kRoot / "cfg" / "manifest.json"));
  EXPECT_EQ(m["config"]["K"], 2);
  EXPECT_EQ(m["config"]["N"], 20);
  EXPECT_EQ(m["config"]["seed"], 4);
}

TEST_F(Cli, NonEmptyOutputNeedsForce) {
  ASSERT_EQ(run("tail --N 20 --R 5 --out " + dir("t")), 0);
  EXPECT_EQ(run("tail --N 20 --R 5 --out " + dir("t")), 2);
  EXPECT_EQ(run("tail --N 20 --R 5 --out " + dir("t") + " --force"), 0);
}

TEST_F(Cli, NumericalFailureExitsThree) {
  std::ofstream(kRoot / "y.csv") << "1e200\n-1e200\n";
  EXPECT_EQ(run("hierarchical --y-csv " + dir("y.csv") + " --N 5 --R 1 --out " + dir("h")), 3);
}

TEST_F(Cli, EnvironmentVariableSetsDefaultOutputDirectory) {
  ASSERT_EQ(run("scaling", "PFMC_OUT_DIR=\"" + dir("env") + "\""), 0);
  EXPECT_TRUE(fs::exists(kRoot / "env" / "scaling" / "manifest.json"));
}

TEST_F(Cli, ManifestRerunIsBitIdentical) {
  ASSERT_EQ(run("mixture --N 20 --R 10 --seed 3 --out " + dir("a")), 0);
  ASSERT_EQ(run("run --manifest " + dir("a/manifest.json") + " --out " + dir("b")), 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(kRoot / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(kRoot / "b" / e.path().filename())) << e.path().filename();
    ++compared;
  }
  EXPECT_GT(compared, 2u);
}

TEST_F(Cli, ManifestMismatchExitsOne) {
  ASSERT_EQ(run("tail --N 20 --R 5 --out " + dir("a")), 0);
  auto m = nlohmann::json::parse(slurp(kRoot / "a" / "manifest.json"));
  m["outputs"][0]["fnv1a64"] = "0000000000000000";
  std::ofstream(kRoot / "tampered.json") << m.dump();
  EXPECT_EQ(run("run --manifest " + dir("tampered.json") + " --out " + dir("b")), 1);
  EXPECT_EQ(run("run --manifest " + dir("missing.json") + " --out " + dir("c")), 2);
}

}  // namespace
