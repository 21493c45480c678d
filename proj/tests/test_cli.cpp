#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef KASHAEV_CLI_PATH
#error "KASHAEV_CLI_PATH must point at the kashaev binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  json j() const { return json::parse(out); }
};

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() / ("kashaev_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string put(const std::string& name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }

  Outcome run(const std::string& args) {
    fs::path out = dir / "stdout.txt";
    std::string cmd = std::string("\"") + KASHAEV_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                      (dir / "stderr.txt").string() + "\"";
    int st = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
  }
};

std::string ones_cube() {
  json vs = json::array();
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) vs.push_back({{"p", {x, y, z}}, {"v", "1"}});
  return json{{"window", {{0, 0, 0}, {1, 1, 1}}}, {"vertices", vs}}.dump();
}

}  // namespace

TEST_F(Cli, OnesCubeFailsKashaev) {
  auto r = run("kashaev check " + put("ones.json", ones_cube()));
  EXPECT_EQ(r.code, 1);
  auto j = r.j();
  EXPECT_EQ(j["verdict"], "FAIL");
  EXPECT_EQ(j["mode"], "exact");
  ASSERT_EQ(j["findings"].size(), 1u);
  EXPECT_EQ(j["findings"][0]["residual"], "-16");
}

TEST_F(Cli, ComplexBuildThenComfortable) {
  auto b = run("complex build --lex 4");
  ASSERT_EQ(b.code, 0);
  auto r = run("complex comfortable " + put("c4.json", b.out));
  EXPECT_EQ(r.code, 0);
  auto j = r.j();
  EXPECT_EQ(j["comfortable"], true);
  EXPECT_EQ(j["dim_image_psi"], 3);
  EXPECT_EQ(j["dim_c2"], 3);
}

TEST_F(Cli, MinorsRoundTrip) {
  auto t = run("minors from-matrix " + put("m.json", R"({"matrix":[[2,1,1],[1,2,1],[1,1,2]]})"));
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(t.j()["entries"]["7"], "-4");
  std::string tf = put("t.json", t.out);
  auto v = run("minors test " + tf);
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.j()["verdict"], "PASS");
  auto m = run("minors reconstruct " + tf);
  EXPECT_EQ(m.code, 0);
  EXPECT_EQ(m.j()["matrix"][0][1], "1");
}

TEST_F(Cli, TilingAndPile) {
  auto r = run("tiling min 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.j()["tiles"].size(), 6u);
  auto p = run("tiling pile --enumerate 4");
  ASSERT_EQ(p.code, 0);
}

TEST_F(Cli, GenrecSigns) {
  auto r = run("genrec signs --instance box2d --params 4,4 --trials 5 --seed 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.j()["mismatches"].empty());
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("tiling min 2").code, 2);
  EXPECT_EQ(run("kashaev check " + (dir / "missing.json").string()).code, 2);
  EXPECT_EQ(run("no-such-verb").code, 2);
  EXPECT_EQ(run("genrec signs --instance cubic1d --params 1").code, 2);
  EXPECT_EQ(run("kashaev check " + put("bad.json", "{not json")).code, 2);
}

TEST_F(Cli, ExactModeRejectsFloats) {
  std::string f = put("m.json", R"({"matrix":[[2.5,1],[1,2]]})");
  EXPECT_EQ(run("--mode exact minors from-matrix " + f).code, 2);
  auto r = run("minors from-matrix " + f);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.j()["entries"]["1"].is_number());
}

TEST_F(Cli, OutputIsDeterministic) {
  std::string f = put("ones.json", ones_cube());
  auto a = run("kashaev check " + f);
  auto b = run("--jobs 4 kashaev check " + f);
  EXPECT_EQ(a.out, b.out);
  auto out = dir / "written.json";
  run("--out " + out.string() + " kashaev check " + f);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(json::parse(ss.str()), a.j());
}
