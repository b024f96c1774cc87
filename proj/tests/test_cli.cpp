#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(COOPCUT_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, k);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coopcut_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenThenSolve) {
  auto g = run("gen --class grid_i --params '{\"rows\":3,\"cols\":3}' --family labels_i --seed 4 -o " +
               path("inst.json"));
  ASSERT_EQ(g.code, 0) << g.out;
  auto s = run("solve --instance " + path("inst.json") + " --solver MC");
  ASSERT_EQ(s.code, 0) << s.out;
  auto j = json::parse(s.out);
  EXPECT_EQ(j["solver"], "MC");
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_FALSE(j["arcs"].empty());

  // The same instance generated inline gives the same answer.
  auto s2 = run("solve --class grid_i --params '{\"rows\":3,\"cols\":3}' --family labels_i "
                "--instance-seed 4 --solver MC");
  ASSERT_EQ(s2.code, 0) << s2.out;
  auto j2 = json::parse(s2.out);
  EXPECT_EQ(j2["cost"], j["cost"]);
  EXPECT_EQ(j2["arcs"], j["arcs"]);
  EXPECT_EQ(j2["instance"], j["instance"]);
}

TEST_F(Cli, SolveStModeWithTrace) {
  auto s = run("solve --family random --instance-seed 5 --solver GH --trace");
  ASSERT_EQ(s.code, 0) << s.out;
  auto j = json::parse(s.out);
  EXPECT_TRUE(j.contains("trace"));
  EXPECT_EQ(j["trace"]["pruned"], j["arcs"]);
}

TEST_F(Cli, UnknownSolverFails) {
  auto s = run("solve --family random --instance-seed 1 --solver XX");
  EXPECT_NE(s.code, 0);
  EXPECT_NE(s.out.find("unknown solver"), std::string::npos) << s.out;
}

TEST_F(Cli, BenchIsReproducible) {
  json cfg{{"version", 1},
           {"mode", "global"},
           {"instances", json::array({{{"graph_class", "grid_i"},
                                       {"params", {{"rows", 3}, {"cols", 3}}},
                                       {"families", {"labels_i", "unstructured_i"}},
                                       {"seeds", {1, 2}}}})},
           {"solvers", {"MC", "MB", "GH"}},
           {"timing", false},
           {"output", {{"results", "results.jsonl"}, {"summary", "summary.csv"}}}};
  std::ofstream(path("cfg.json")) << cfg.dump();
  std::string first;
  for (int round = 0; round < 2; ++round) {
    auto out = path("run" + std::to_string(round));
    auto b = run("bench --config " + path("cfg.json") + " --out-dir " + out + " --threads 2");
    ASSERT_EQ(b.code, 0) << b.out;
    auto results = slurp(fs::path(out) / "results.jsonl");
    EXPECT_EQ(std::count(results.begin(), results.end(), '\n'), 12);
    if (round == 0) first = results;
    else EXPECT_EQ(results, first);
  }
  auto r = run("report --results " + path("run0/results.jsonl") + " --csv " + path("s.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto csv = slurp(path("s.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), slurp(path("run0/summary.csv")).substr(0, csv.find('\n')));
  EXPECT_EQ(csv.rfind("family,solver,", 0), 0u) << csv;
}

TEST_F(Cli, BenchRejectsStMode) {
  std::ofstream(path("cfg.json")) << R"({"mode": "st", "instances": [], "solvers": ["MC"]})";
  auto b = run("bench --config " + path("cfg.json"));
  EXPECT_NE(b.code, 0);
}

TEST_F(Cli, SelftestSingleCriterion) {
  auto s = run("selftest --only 3 --out " + path("acc"));
  EXPECT_EQ(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("PASS"), std::string::npos) << s.out;
}

TEST_F(Cli, SelftestDetectsInjectedFault) {
  auto s = run("selftest --only 9 --inject-fault --out " + path("acc"));
  EXPECT_NE(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("FAIL"), std::string::npos) << s.out;
  EXPECT_NE(s.out.find("witness"), std::string::npos) << s.out;
}

TEST_F(Cli, SelftestList) {
  auto s = run("selftest --list");
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 10);
}
