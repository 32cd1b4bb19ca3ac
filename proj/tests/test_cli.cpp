#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "qlocc/cli.hpp"

using namespace qlocc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("qlocc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    for (const std::string name : {"s1", "s3", "s5", "tiles33"}) {
      ASSERT_EQ(run_cli({"fixture", name, "-o", path(name)}).code, 0);
    }
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string path(const std::string& name) { return (dir_ / (name + ".qset")).string(); }

  static inline fs::path dir_;
};

nlohmann::json strip_timing(nlohmann::json j) {
  j.erase("timing_ms");
  return j;
}

}  // namespace

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Cli, HelpAndVersion) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(kToolVersion), std::string::npos);
  EXPECT_EQ(run_cli({"no-such-command"}).code, 2);
}

TEST_F(Cli, CheckOrtho) {
  const auto r = run_cli({"check-ortho", "--set", path("s1"), "--json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "check-ortho");
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_EQ(j["inputs"].size(), 1u);
}

TEST_F(Cli, BadInputsExitTwo) {
  const std::string bad = (dir_ / "bad.qset").string();
  std::ofstream(bad) << "qset v1\ndims: 2 2\nstate a: |0,5>\n";
  const auto r = run_cli({"check-ortho", "--set", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_EQ(run_cli({"check-ortho", "--set", (dir_ / "missing.qset").string()}).code, 2);
}

TEST_F(Cli, NonOrthogonalExitsOne) {
  const std::string p = (dir_ / "overlap.qset").string();
  std::ofstream(p) << "qset v1\ndims: 2 2\nstate a: |0,0>\nstate b: |0,0> + |1,1>\n";
  EXPECT_EQ(run_cli({"check-ortho", "--set", p}).code, 1);
}

TEST_F(Cli, ActivateS1) {
  const auto r = run_cli({"activate", "--set", path("s1"), "--max-depth", "6", "--json"});
  EXPECT_EQ(r.code, 1) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["certificate"]["kind"], "NonActivabilityInClass");
}

TEST_F(Cli, ActivateS3Builtin) {
  const auto r = run_cli({"activate", "--set", path("s3"), "--protocol", "builtin:s3_activation"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, Upb) {
  EXPECT_EQ(run_cli({"upb", "--set", path("tiles33")}).code, 0);
  EXPECT_EQ(run_cli({"upb", "--set", path("s1")}).code, 1);
}

TEST_F(Cli, ProtocolVerifyAndSearch) {
  EXPECT_EQ(run_cli({"protocol", "verify", "--set", path("s3"), "--protocol", "builtin:s3_discrimination"}).code, 0);
  const std::string open_leaf = (dir_ / "open.json").string();
  std::ofstream(open_leaf) << R"({"set": null})";
  EXPECT_EQ(run_cli({"protocol", "verify", "--set", path("s3"), "--protocol", open_leaf}).code, 1);
  // Operators of the wrong dimension are an input error.
  EXPECT_EQ(run_cli({"protocol", "verify", "--set", path("s3"), "--protocol", "builtin:s1_recursion"}).code, 2);
  EXPECT_EQ(run_cli({"protocol", "search", "--set", path("tiles33"), "--max-depth", "3"}).code, 1);
}

TEST_F(Cli, ProtocolFileRoundTrip) {
  const auto r = run_cli({"protocol", "search", "--set", path("s1"), "--max-depth", "6", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const std::string tree = (dir_ / "tree.json").string();
  std::ofstream(tree) << j["certificate"]["tree"].dump();
  EXPECT_EQ(run_cli({"protocol", "verify", "--set", path("s1"), "--protocol", tree}).code, 0);
}

TEST_F(Cli, RedundancyAndIrreducible) {
  EXPECT_EQ(run_cli({"redundancy", "--set", path("s3")}).code, 0);
  EXPECT_EQ(run_cli({"irreducible", "--set", path("tiles33")}).code, 0);
  EXPECT_EQ(run_cli({"irreducible", "--set", path("s1")}).code, 1);
  EXPECT_EQ(run_cli({"oplm", "--set", path("s1"), "--party", "0"}).code, 0);
}

TEST_F(Cli, RenderOverlayToFile) {
  const std::string out = (dir_ / "s3.svg").string();
  const auto r = run_cli({"render", "--set", path("s3"), "--format", "svg", "--reorder", "--overlay",
                          "builtin:s3_activation:root", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  const std::string svg((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(svg.find("data-outcome=\"K_B1\""), std::string::npos);
  EXPECT_EQ(run_cli({"render", "--set", path("s3")}).code, 2);
  EXPECT_EQ(run_cli({"render", "--set", path("s5"), "--no-pairs"}).code, 2);
}

TEST_F(Cli, JsonDeterministicModuloTiming) {
  for (const std::vector<std::string> args :
       {std::vector<std::string>{"upb", "--set", path("tiles33"), "--json"},
        std::vector<std::string>{"oplm", "--set", path("s1"), "--json"}}) {
    const auto a = run_cli(args), b = run_cli(args);
    EXPECT_EQ(strip_timing(nlohmann::json::parse(a.out)), strip_timing(nlohmann::json::parse(b.out)));
  }
}

TEST_F(Cli, ToolBinary) {
  const std::string cmd = std::string(QLOCC_TOOL_PATH) + " check-ortho --set " + path("tiles33") + " > /dev/null";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  const std::string bad = std::string(QLOCC_TOOL_PATH) + " upb --set " + path("s5") + " 2> /dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(bad.c_str())), 2);
}
