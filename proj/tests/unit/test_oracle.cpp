#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/oracle.hpp"
#include "onefactor/rng.hpp"
#include "test_util.hpp"

using namespace onefactor;

namespace {

std::uint64_t double_factorial_odd(std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i < 2 * k; i += 2) r *= i;
  return r;
}

// Plain recursive count over matrices; no memo, no Gray code.
std::uint64_t naive_permanent(const std::vector<std::vector<char>>& a, std::size_t row,
                              std::vector<char>& used) {
  if (row == a.size()) return 1;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[row][j] && !used[j]) {
      used[j] = 1;
      total += naive_permanent(a, row + 1, used);
      used[j] = 0;
    }
  }
  return total;
}

// Latin squares of order 3 by brute force over all 3^9 fillings.
std::size_t latin_squares_3() {
  std::size_t count = 0;
  for (int code = 0; code < 19683; ++code) {
    int cell[9];
    int c = code;
    for (int& x : cell) {
      x = c % 3;
      c /= 3;
    }
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      for (int j = 0; j < 3 && ok; ++j)
        for (int k = j + 1; k < 3 && ok; ++k)
          ok = cell[3 * i + j] != cell[3 * i + k] && cell[3 * j + i] != cell[3 * k + i];
    count += ok;
  }
  return count;
}

}  // namespace

TEST(PerfectMatchings, CompleteGraphs) {
  for (std::uint64_t k = 1; k <= 6; ++k) {
    Graph g = complete_graph(2 * k);
    EXPECT_EQ(count_perfect_matchings(g), double_factorial_odd(k));
    if (k <= 5) EXPECT_EQ(enumerate_perfect_matchings(g).size(), double_factorial_odd(k));
  }
}

TEST(PerfectMatchings, SixCycle) {
  std::vector<Edge> es;
  for (Vertex i = 0; i < 6; ++i) es.emplace_back(i, (i + 1) % 6);
  Graph c6 = Graph::from_edge_list(6, es);
  auto all = enumerate_perfect_matchings(c6);
  EXPECT_EQ(all.size(), 2u);
  EXPECT_EQ(count_perfect_matchings(c6), 2u);
  for (const auto& m : all) EXPECT_EQ(m.size(), 3u);
}

TEST(PerfectMatchings, Errors) {
  EXPECT_THROW(enumerate_perfect_matchings(complete_graph(5)), Error);
  EXPECT_THROW(enumerate_perfect_matchings(complete_graph(18)), Error);
}

TEST(PerfectMatchings, EnumerationIsSound) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Graph g = random_gnp(12, 0.5, s);
    auto all = enumerate_perfect_matchings(g);
    std::set<Matching> uniq(all.begin(), all.end());
    EXPECT_EQ(uniq.size(), all.size());
    for (const auto& m : all) {
      EXPECT_EQ(m.size(), 6u);
      EXPECT_TRUE(is_matching(m.edges, 12));
      for (const Edge& e : m.edges) EXPECT_TRUE(g.has_edge(e));
    }
    EXPECT_EQ(count_perfect_matchings(g), all.size());
  }
}

TEST(Permanent, AllOnesAndIdentity) {
  std::uint64_t fact = 1;
  for (std::size_t k = 1; k <= 8; ++k) {
    fact *= k;
    std::vector<std::vector<char>> ones(k, std::vector<char>(k, 1)), id(k, std::vector<char>(k, 0));
    for (std::size_t i = 0; i < k; ++i) id[i][i] = 1;
    EXPECT_EQ(ryser_permanent(ones), BigInt(fact));
    EXPECT_EQ(ryser_permanent(id), BigInt(1));
  }
  EXPECT_EQ(ryser_permanent({}), BigInt(1));
}

TEST(Permanent, RandomAgainstRecursion) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::vector<char>> a(8, std::vector<char>(8, 0));
    for (auto& row : a)
      for (auto& x : row) x = coin(rng, 0.5);
    std::vector<char> used(8, 0);
    EXPECT_EQ(ryser_permanent(a), BigInt(naive_permanent(a, 0, used)));
  }
}

TEST(Permanent, MatchesBipartiteMatchingCount) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Graph g = random_bipartite(7, 7, 0.6, s);
    auto a = bipartite_adjacency(g, Bipartition::canonical(7, 7));
    EXPECT_EQ(ryser_permanent(a), BigInt(count_perfect_matchings(g)));
  }
  EXPECT_THROW(bipartite_adjacency(complete_bipartite(2, 3), Bipartition::canonical(2, 3)), Error);
}

TEST(Permanent, LargeUsesBigIntegers) {
  std::vector<std::vector<char>> ones(24, std::vector<char>(24, 1));
  BigInt fact = 1;
  for (int i = 2; i <= 24; ++i) fact *= i;
  EXPECT_EQ(ryser_permanent(ones), fact);
  EXPECT_THROW(ryser_permanent(std::vector<std::vector<char>>(29, std::vector<char>(29, 1))), Error);
}

TEST(Factorizations, SmallCompleteGraphs) {
  EXPECT_EQ(count_one_factorizations(complete_graph(2), CountMode::Unordered), BigInt(1));
  EXPECT_EQ(count_one_factorizations(complete_graph(4), CountMode::Unordered), BigInt(1));
  EXPECT_EQ(count_one_factorizations(complete_graph(4), CountMode::Ordered), BigInt(6));
  EXPECT_EQ(count_one_factorizations(complete_graph(6), CountMode::Unordered), BigInt(6));
  EXPECT_EQ(count_one_factorizations(complete_graph(6), CountMode::Ordered), BigInt(720));
}

TEST(Factorizations, K33OrderedIsLatinSquares) {
  Graph g = complete_bipartite(3, 3);
  const std::size_t latin = latin_squares_3();
  EXPECT_EQ(latin, 12u);
  EXPECT_EQ(count_one_factorizations(g, CountMode::Ordered), BigInt(latin));
  EXPECT_EQ(count_one_factorizations(g, CountMode::Unordered), BigInt(2));
}

TEST(Factorizations, VisitorProducesValidDistinctCanonicalForms) {
  Graph g = complete_graph(6);
  std::set<std::string> seen;
  const auto visited = for_each_factorization(g, [&](const Factorization& f) {
    EXPECT_TRUE(testutil::validates(g, f, true));
    EXPECT_EQ(canonical_text(canonicalize(f)), canonical_text(f));
    seen.insert(canonical_text(f));
  });
  EXPECT_EQ(visited, 6u);
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Factorizations, RelabelingInvariance) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    Graph g = random_regular(10, 3, s);
    Graph h = permute_vertices(g, s + 100);
    EXPECT_EQ(count_one_factorizations(g, CountMode::Unordered),
              count_one_factorizations(h, CountMode::Unordered));
    EXPECT_EQ(count_perfect_matchings(g), count_perfect_matchings(h));
  }
}

TEST(Factorizations, Errors) {
  EXPECT_THROW(count_one_factorizations(Graph::from_edge_list(4, std::vector<Edge>{{0, 1}, {1, 2}}),
                                        CountMode::Unordered),
               Error);
  EXPECT_THROW(count_one_factorizations(complete_graph(5), CountMode::Unordered), Error);
  EXPECT_THROW(count_one_factorizations(complete_graph(18), CountMode::Unordered), Error);
}

TEST(CountReport, OrderedIsUnorderedTimesDFactorial) {
  CountReport r = count_report(complete_graph(6), true);
  EXPECT_EQ(r.perfect_matchings, 15u);
  EXPECT_EQ(r.factorizations_unordered, BigInt(6));
  EXPECT_EQ(r.factorizations_ordered, BigInt(720));
  ASSERT_TRUE(r.witnesses.has_value());
  EXPECT_EQ(r.witnesses->size(), 6u);
}

TEST(Bound, SmallCompleteGraphsClearTheBound) {
  for (std::size_t n : {4u, 6u}) {
    BoundComparison b = bound_comparison(complete_graph(n));
    EXPECT_TRUE(b.passed);
    EXPECT_GE(b.log_exact, b.log_simplified);
    EXPECT_DOUBLE_EQ(b.log_bound, b.log_simplified);
  }
  BoundComparison c = bound_comparison(complete_graph(6), 2.0);
  EXPECT_LT(c.log_bound, c.log_simplified);
}

TEST(Golden, FixtureMatchesSmallGraphs) {
  std::ifstream in(std::string(ONEFACTOR_FIXTURES) + "/golden_counts.json");
  ASSERT_TRUE(in.good());
  auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j.size(), 3u);
  for (const auto& entry : j) {
    const std::string name = entry["graph_id"];
    const std::size_t n = entry["n"];
    if (n > 6) continue;  // K_8 is checked by the acceptance binary
    Graph g = complete_graph(n);
    EXPECT_EQ(count_perfect_matchings(g), entry["pm_count"].get<std::uint64_t>()) << name;
    EXPECT_EQ(count_one_factorizations(g, CountMode::Unordered).str(),
              entry["factorization_count_unordered"].get<std::string>())
        << name;
  }
}
