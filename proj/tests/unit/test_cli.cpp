#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/io.hpp"
#include "onefactor/nibble.hpp"
#include "onefactor/oracle.hpp"

using namespace onefactor;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(ONEFACTOR_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scratch(const std::string& name) {
  fs::path dir = fs::path(ONEFACTOR_SCRATCH);
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::string path = scratch(name);
  std::ofstream(path) << text;
  return path;
}

std::string write_graph(const std::string& name, const Graph& g) {
  return write_file(name, edge_list_text(g));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json last_json(const std::string& out) {
  const auto pos = out.find('{');
  if (pos == std::string::npos) return nlohmann::json();
  return nlohmann::json::parse(out.substr(pos));
}

}  // namespace

TEST(Cli, GenerateThenVerifyK6) {
  const std::string g = write_graph("k6.txt", complete_graph(6));
  const std::string f = scratch("k6.fact");
  Result r = cli("generate " + g + " -o " + f + " --degenerate --seed 3");
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = last_json(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_EQ(j["n"], 6);
  Result v = cli("verify " + g + " " + f);
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(v.out, "ok\n");
}

TEST(Cli, GenerateIsDeterministicOutsidePerf) {
  const std::string g = write_graph("k8.txt", complete_graph(8));
  Result a = cli("generate " + g + " -o " + scratch("a.fact") + " --degenerate --seed 5");
  Result b = cli("generate " + g + " -o " + scratch("b.fact") + " --degenerate --seed 5");
  ASSERT_EQ(a.code, 0);
  auto ja = last_json(a.out), jb = last_json(b.out);
  ja.erase("perf");
  jb.erase("perf");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(read_file(scratch("a.fact")), read_file(scratch("b.fact")));
}

TEST(Cli, MalformedLineIsParseError) {
  const std::string g = write_file("bad.txt", "4 2\n0 1\na b\n");
  Result r = cli("generate " + g + " -o " + scratch("bad.fact"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
}

TEST(Cli, SparseGraphIsPreconditionFailure) {
  const std::string g = write_graph("sparse.txt", random_regular(20, 4, 1));
  Result r = cli("generate " + g + " -o " + scratch("sparse.fact"));
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST(Cli, VerifyReportsMissingEdge) {
  const std::string g = write_graph("k4.txt", complete_graph(4));
  const std::string f = write_file("k4_missing.fact", "4 3\n0-1 2-3\n0-2 1-3\n0-3\n");
  Result r = cli("verify " + g + " " + f);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("union mismatch"), std::string::npos) << r.out;
  const std::string ok = write_file("k4.fact", "4 3\n0-1 2-3\n0-2 1-3\n0-3 1-2\n");
  EXPECT_EQ(cli("verify " + g + " " + ok).code, 0);
}

TEST(Cli, VerifyReportsEdgeOutsideGraph) {
  // Triangular prism versus a relabeled copy of itself.
  Graph prism = Graph::from_edge_list(
      6, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}});
  Graph relabeled = Graph::from_edge_list(
      6, std::vector<Edge>{{0, 1}, {1, 3}, {0, 3}, {2, 4}, {4, 5}, {2, 5}, {0, 2}, {1, 4}, {3, 5}});
  ASSERT_NE(prism, relabeled);
  Factorization f;
  for_each_factorization(relabeled, [&](const Factorization& x) {
    if (f.matchings.empty()) f = x;
  });
  ASSERT_EQ(f.size(), 3u);
  const std::string g = write_graph("prism.txt", prism);
  const std::string ff = write_file("relabeled.fact", factorization_text(6, f));
  Result r = cli("verify " + g + " " + ff);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("edge outside graph"), std::string::npos) << r.out;
}

TEST(Cli, CountK6) {
  const std::string g = write_graph("k6c.txt", complete_graph(6));
  Result r = cli("count " + g);
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = last_json(r.out);
  EXPECT_EQ(j["pm"], 15);
  EXPECT_EQ(j["fact_unordered"], 6);
  auto both = last_json(cli("count " + g + " --mode both").out);
  EXPECT_EQ(both["fact_ordered"], 720);
  EXPECT_EQ(cli("count " + write_graph("k5path.txt", random_regular(6, 2, 1)) + " --cap 4").code, 3);
}

TEST(Cli, Bound) {
  Result r = cli("bound 8 7");
  ASSERT_EQ(r.code, 0);
  auto j = last_json(r.out);
  EXPECT_NEAR(j["log_bound"].get<double>(), -1.51452, 1e-5);
  EXPECT_TRUE(j["C"].is_null());
  auto jc = last_json(cli("bound 8 7 --C 3").out);
  EXPECT_LT(jc["log_bound"].get<double>(), j["log_bound"].get<double>());
  EXPECT_EQ(cli("bound 8 9").code, 3);
}

TEST(Cli, NibbleStatsRowCount) {
  const std::string g = write_graph("r400.txt", random_regular(400, 40, 2));
  const std::string csv = scratch("stages.csv");
  Result r = cli("nibble-stats " + g + " --tau 0.1 --seed 1 --csv " + csv);
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = last_json(r.out);
  EXPECT_EQ(j["t_tau"], t_tau(0.1));
  std::ifstream in(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, t_tau(0.1) + 1);
}

TEST(Cli, RandomRegular) {
  Result a = cli("random-regular 30 7 --seed 4");
  Result b = cli("random-regular 30 7 --seed 4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  Graph g = read_edge_list(in);
  EXPECT_TRUE(g.is_regular());
  EXPECT_EQ(g.max_degree(), 7u);
  EXPECT_EQ(cli("random-regular 7 3").code, 3);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("verify onlyone").code, 2);
}

TEST(Cli, BenchSmall) {
  Result r = cli("bench");
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = last_json(r.out);
  for (const auto& c : j["cases"]) EXPECT_TRUE(c["ok"].get<bool>()) << c.dump();
  EXPECT_TRUE(j["perf"].is_object());
}
