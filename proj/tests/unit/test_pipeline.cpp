#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/oracle.hpp"
#include "onefactor/pipeline.hpp"
#include "test_util.hpp"

using namespace onefactor;

namespace {

RunConfig degenerate_cfg(std::uint64_t seed) {
  RunConfig cfg;
  cfg.K = 1;
  cfg.degenerate_mode = true;
  cfg.epsilon = 0.1;
  cfg.p = 1.0;
  cfg.seed = seed;
  return cfg;
}

std::set<std::string> oracle_set(const Graph& g) {
  std::set<std::string> out;
  for_each_factorization(g, [&](const Factorization& f) { out.insert(canonical_text(canonicalize(f))); });
  return out;
}

RunConfig desk_cfg(std::uint64_t seed) {
  RunConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Pipeline, DegenerateSmallCompleteGraphs) {
  for (std::size_t n : {6u, 8u}) {
    Graph g = complete_graph(n);
    const auto known = oracle_set(g);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      RunReport r = run(g, degenerate_cfg(seed));
      EXPECT_TRUE(r.valid);
      EXPECT_EQ(r.factorization.size(), n - 1);
      EXPECT_TRUE(testutil::validates(g, r.factorization, true));
      EXPECT_TRUE(known.count(canonical_text(canonicalize(r.factorization)))) << "n=" << n;
      EXPECT_EQ(r.hash, canonical_hash(r.factorization));
    }
  }
}

TEST(Pipeline, SparseInputRejected) {
  Graph g = random_regular(40, 10, 1);
  try {
    run(g, desk_cfg(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
  }
  EXPECT_THROW(run(complete_graph(7), desk_cfg(1)), Error);
  Graph path = Graph::from_edge_list(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  EXPECT_THROW(run(path, desk_cfg(1)), Error);
}

TEST(Pipeline, DeskScaleRunIsValidAndDeterministic) {
  Graph g = random_regular(120, 70, 11);
  RunReport a = run(g, desk_cfg(3));
  RunReport b = run(g, desk_cfg(3));
  EXPECT_TRUE(a.valid);
  EXPECT_EQ(a.factorization.size(), 70u);
  EXPECT_TRUE(testutil::validates(g, a.factorization, true));
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.extended_matchings + a.completion_matchings, 70u);
  ASSERT_EQ(a.stages.size(), 5u);
  EXPECT_EQ(a.stages[0].name, "good_subgraph");
  EXPECT_EQ(a.stages[4].name, "completion");
}

TEST(Pipeline, ReportJson) {
  Graph g = complete_graph(8);
  RunConfig cfg = degenerate_cfg(2);
  RunReport r = run(g, cfg);
  auto j = nlohmann::json::parse(report_to_json(r, cfg));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["n"], 8);
  EXPECT_EQ(j["d"], 7);
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_EQ(j["hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(j["config"].is_object());
  ASSERT_TRUE(j["stages"].is_array());
  for (const auto& st : j["stages"]) {
    EXPECT_TRUE(st.contains("name"));
    EXPECT_TRUE(st.contains("retries"));
    EXPECT_TRUE(st.contains("violations"));
    EXPECT_FALSE(st.contains("seconds"));
  }
  EXPECT_TRUE(j["perf"].is_object());
  EXPECT_TRUE(j["perf"].contains("total"));
}

TEST(LowerBound, Examples) {
  EXPECT_NEAR(lower_bound_log(8, 7), 28 * (std::log(7.0) - 2), 1e-12);
  EXPECT_NEAR(lower_bound_log(8, 7), -1.51452, 1e-5);
  EXPECT_NEAR(std::exp(lower_bound_log(8, 7)), 0.2199, 1e-4);
  EXPECT_NEAR(lower_bound_log(100, std::exp(2.0)), 0.0, 1e-12);
  // With C the factor (1 - n^{-1/C}) enters once per edge.
  const double c = 3;
  EXPECT_NEAR(lower_bound_log(8, 7, c), 28 * (std::log(7.0) - 2 + std::log(1 - std::pow(8.0, -1 / c))), 1e-12);
}

TEST(LowerBound, MonotoneAboveESquared) {
  double prev = lower_bound_log(1000, 7.5);
  for (double d = 8; d < 999; d += 7) {
    const double cur = lower_bound_log(1000, d);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(LowerBound, DomainErrors) {
  EXPECT_THROW(lower_bound_log(1, 1), Error);
  EXPECT_THROW(lower_bound_log(8, 8), Error);
  EXPECT_THROW(lower_bound_log(8, 0), Error);
  EXPECT_THROW(lower_bound_log(8, 7, 0.0), Error);
}

TEST(GenerateDistinct, K4HasOneFactorization) {
  DistinctReport r = generate_distinct(complete_graph(4), degenerate_cfg(0), 10);
  EXPECT_EQ(r.runs, 10u);
  EXPECT_EQ(r.successes, 10u);
  EXPECT_EQ(r.distinct.size(), 1u);
  EXPECT_EQ(r.collisions, 9u);
}

TEST(GenerateDistinct, K6WithinOracleSet) {
  Graph g = complete_graph(6);
  const auto known = oracle_set(g);
  ASSERT_EQ(known.size(), 6u);
  DistinctReport r = generate_distinct(g, degenerate_cfg(5), 50);
  EXPECT_EQ(r.successes + r.failures, 50u);
  EXPECT_GE(r.distinct.size(), 1u);
  EXPECT_LE(r.distinct.size(), 6u);
  EXPECT_EQ(r.collisions, r.successes - r.distinct.size());
  for (const auto& [h, f] : r.distinct) {
    EXPECT_EQ(h, canonical_hash(f));
    EXPECT_TRUE(known.count(canonical_text(f)));
  }
}

TEST(AsymptoticDefaults, Formulas) {
  RunConfig cfg = asymptotic_defaults(1000, 900);
  EXPECT_DOUBLE_EQ(cfg.C, 20000);
  EXPECT_DOUBLE_EQ(cfg.epsilon, std::pow(1000.0, -1 / 20000.0));
  EXPECT_DOUBLE_EQ(cfg.p, cfg.epsilon * cfg.epsilon);
  EXPECT_EQ(cfg.K, 1u);
  EXPECT_TRUE(cfg.degenerate_mode);
  EXPECT_DOUBLE_EQ(asymptotic_defaults(1000, 900, 20).C, 40000);
}

TEST(AsymptoticDefaults, ConstraintReportAtDeskScale) {
  RunConfig cfg = asymptotic_defaults(10000, 9000);
  EXPECT_FALSE(cfg.constraint_violations.empty());
  EXPECT_EQ(constraint_report(10000, 9000, cfg), cfg.constraint_violations);
  EXPECT_THROW(asymptotic_defaults(7, 4), Error);
}
