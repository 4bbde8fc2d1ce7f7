// SPDX-License-Identifier: Apache-2.0
// Runs the wste executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "json.hpp"

using wste::testing::source_path;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(WSTE_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string src(const std::string& rel) { return "'" + source_path(rel) + "'"; }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("wste_cli_" + std::to_string(::getpid()))) { fs::create_directories(path_); }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return (path_ / name).string();
  }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

#define REQUIRE_SOLVER() \
  if (!wste::testing::solver_available()) GTEST_SKIP() << "z3 not on PATH"

// Drops every field that carries wall-clock time.
void strip_times(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("timings");
    j.erase("seconds");
    j.erase("emit_seconds");
    for (auto& [k, v] : j.items()) strip_times(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_times(v);
  }
}

}  // namespace

TEST(Cli, PassExitsZero) {
  REQUIRE_SOLVER();
  Result r = run("verify " + src("designs/demo/two_gate.wdl") + " " + src("designs/demo/two_gate.spec"));
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, FailExitsOneWithCounterexample) {
  REQUIRE_SOLVER();
  Result r = run("verify " + src("designs/sad/sad_m2.wdl") + " " + src("designs/sad/p1.spec") + " --format json");
  ASSERT_EQ(r.code, 1) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_TRUE(j["counterexample"]["model_valid"].get<bool>());
  EXPECT_TRUE(j["counterexample"]["replay"]["confirmed"].get<bool>());
  EXPECT_FALSE(j["counterexample"]["violated"].empty());
}

TEST(Cli, AntecedentFailureExitsTwo) {
  REQUIRE_SOLVER();
  Result r = run("verify " + src("designs/demo/two_gate.wdl") + " " + src("designs/demo/two_gate_antfail.spec"));
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("t@0"), std::string::npos) << r.out;
}

TEST(Cli, UnknownExitsThree) {
  Result r = run("verify " + src("designs/sad/sad.wdl") + " " + src("designs/sad/p1.spec") +
                 " --solver 'echo unknown; true {}'");
  EXPECT_EQ(r.code, 3) << r.out;
  Result missing = run("verify " + src("designs/sad/sad.wdl") + " " + src("designs/sad/p1.spec") +
                       " --solver '/nonexistent/solver {}'");
  EXPECT_EQ(missing.code, 3) << missing.out;
}

TEST(Cli, UsageErrorsExitFour) {
  EXPECT_EQ(run("").code, 4);
  EXPECT_EQ(run("verify").code, 4);
  EXPECT_EQ(run("verify /nonexistent.wdl /nonexistent.spec").code, 4);
  EXPECT_EQ(run("verify " + src("designs/sad/sad.wdl") + " " + src("designs/sad/p1.spec") + " --mode foo").code, 4);
  EXPECT_EQ(run("verify " + src("designs/sad/sad.wdl") + " " + src("designs/sad/p1.spec") + " -P V=3").code, 4);
  TempDir tmp;
  std::string bad = tmp.write("bad.wdl", "input a:4;\nwire y:4;\ny = a +;\n");
  Result r = run("atomize '" + bad + "'");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("bad.wdl:3:"), std::string::npos) << r.out;
}

TEST(Cli, JsonReportIsDeterministic) {
  REQUIRE_SOLVER();
  std::string args = "verify " + src("designs/smul/smul.wdl") + " " + src("designs/smul/q2.spec") + " --format json";
  auto a = nlohmann::json::parse(run(args).out), b = nlohmann::json::parse(run(args).out);
  EXPECT_EQ(a["schema"], "wste-report/1");
  strip_times(a);
  strip_times(b);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, DumpSmtAndNoSolve) {
  TempDir tmp;
  Result r = run("verify " + src("designs/demo/two_gate.wdl") + " " + src("designs/demo/two_gate.spec") +
                 " --no-solve --dump-smt '" + (tmp / "q") + "'");
  EXPECT_EQ(r.code, 3) << r.out;
  std::ifstream in(tmp / "q.negok.smt2");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ifstream gin(source_path("tests/golden/two_gate.negok.smt2"));
  std::string golden((std::istreambuf_iterator<char>(gin)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, golden);
}

TEST(Cli, AtomizeTable) {
  Result r = run("atomize " + src("designs/sad/sad.wdl") + " -P W=32");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("largest atom"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("acc\t32\t31:16 15:0"), std::string::npos) << r.out;
}

TEST(Cli, SimulateRegisterChainWithX) {
  TempDir tmp;
  std::string d = tmp.write("c.wdl", "input a:4; reg r1:4, r2:4; r1 <= a; r2 <= r1;\n");
  std::string s = tmp.write("c.stim", "a=3\na=0b1X01 // one unknown bit\na=X\n");
  Result r = run("simulate '" + d + "' '" + s + "' --budget 16 --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["frames"].size(), 3u);
  EXPECT_EQ(j["frames"][0]["r1"], "0bXXXX");
  EXPECT_EQ(j["frames"][1]["r1"], "0x3");
  EXPECT_EQ(j["frames"][2]["r1"], "0b1X01");
  EXPECT_EQ(j["frames"][2]["r2"], "0x3");
}

TEST(Cli, SimulateErrors) {
  TempDir tmp;
  std::string d = tmp.write("c.wdl", "input a:4; reg r1:4; r1 <= a;\n");
  EXPECT_EQ(run("simulate '" + d + "' '" + tmp.write("u.stim", "a=3\nb=1\n") + "'").code, 4);
  EXPECT_EQ(run("simulate '" + d + "' '" + tmp.write("w.stim", "a=0x1f\n") + "'").code, 4);
  EXPECT_EQ(run("simulate '" + d + "' '" + tmp.write("x.stim", "a=X\na=X\na=X\na=X\n") + "' --budget 4").code, 4);
}
