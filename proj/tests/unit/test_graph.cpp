#include <gtest/gtest.h>

#include <sstream>

#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/graph.hpp"
#include "onefactor/io.hpp"
#include "onefactor/rng.hpp"
#include "test_util.hpp"

using namespace onefactor;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvariantBroken;
}

}  // namespace

TEST(Graph, FromEdgeListBasic) {
  std::vector<Edge> es{{0, 1}, {2, 3}};
  Graph g = Graph::from_edge_list(4, es);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degrees(), (std::vector<std::size_t>{1, 1, 1, 1}));
}

TEST(Graph, FromEdgeListErrors) {
  EXPECT_EQ(code_of([] { Graph::from_edge_list(2, std::vector<Edge>{Edge(0, 0)}); }),
            ErrorCode::SelfLoop);
  EXPECT_EQ(code_of([] { Graph::from_edge_list(3, std::vector<Edge>{{0, 1}, {1, 0}}); }),
            ErrorCode::DuplicateEdge);
  EXPECT_EQ(code_of([] { Graph::from_edge_list(3, std::vector<Edge>{{0, 3}}); }),
            ErrorCode::VertexOutOfRange);
}

TEST(Graph, AllPairsOfSixIsK6) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex u = 0; u < 6; ++u)
    for (Vertex v = u + 1; v < 6; ++v) pairs.emplace_back(v, u);
  Graph g = Graph::from_edge_list(6, pairs);
  EXPECT_EQ(g.num_edges(), 15u);
  EXPECT_TRUE(g.is_regular());
  EXPECT_EQ(g.max_degree(), 5u);
  EXPECT_EQ(g, complete_graph(6));
}

TEST(Graph, CompleteFamilies) {
  EXPECT_EQ(complete_graph(4).num_edges(), 6u);
  EXPECT_EQ(complete_graph(4).min_degree(), 3u);
  Graph k33 = complete_bipartite(3, 3);
  EXPECT_EQ(k33.num_edges(), 9u);
  EXPECT_TRUE(k33.is_regular());
  EXPECT_EQ(k33.max_degree(), 3u);
  Bipartition bip = Bipartition::canonical(3, 3);
  for (const Edge& e : k33.edges()) EXPECT_TRUE(bip.crosses(e));
  EXPECT_EQ(complete_graph(1).num_edges(), 0u);
}

TEST(Graph, HandshakeAndAdjacencyAgree) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Graph g = random_gnp(40, 0.2, s);
    std::size_t sum = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v) sum += g.degree(v);
    EXPECT_EQ(sum, 2 * g.num_edges());
    EXPECT_EQ(g.degrees(), testutil::degree_scan(g));
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      for (Vertex w : g.neighbors(v)) EXPECT_TRUE(g.has_edge(v, w));
  }
}

TEST(RandomRegular, ForcedAndInfeasible) {
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_EQ(random_regular(6, 5, s), complete_graph(6));
  EXPECT_EQ(code_of([] { random_regular(5, 3, 1); }), ErrorCode::InfeasibleDegree);
  EXPECT_EQ(code_of([] { random_regular(4, 4, 1); }), ErrorCode::InfeasibleDegree);
}

TEST(RandomRegular, DegreesExact) {
  Graph g = random_regular(20, 11, 3);
  for (std::size_t d : testutil::degree_scan(g)) EXPECT_EQ(d, 11u);
  for (std::size_t n : {10u, 31u, 64u, 120u}) {
    for (std::size_t d : {2u, 3u, 7u, 9u}) {
      if ((n * d) % 2 != 0 || d >= n) continue;
      for (std::uint64_t s = 0; s < 4; ++s) {
        Graph h = random_regular(n, d, s);
        for (std::size_t x : testutil::degree_scan(h)) ASSERT_EQ(x, d) << n << " " << d;
      }
    }
  }
}

TEST(RandomRegular, DeterministicPerSeed) {
  EXPECT_EQ(random_regular(50, 7, 11), random_regular(50, 7, 11));
  EXPECT_NE(random_regular(50, 7, 11), random_regular(50, 7, 12));
}

TEST(RandomRegular, AvoidsGivenEdges) {
  Graph h = random_regular_bipartite(20, 6, 1);
  Graph extra = random_regular(40, 2, 5, 64, &h);
  for (const Edge& e : extra.edges()) EXPECT_FALSE(h.has_edge(e));
}

TEST(RandomRegularBipartite, RegularAndCrossing) {
  Graph g = random_regular_bipartite(30, 8, 2);
  Bipartition bip = Bipartition::canonical(30, 30);
  EXPECT_TRUE(g.is_regular());
  EXPECT_EQ(g.max_degree(), 8u);
  for (const Edge& e : g.edges()) EXPECT_TRUE(bip.crosses(e));
}

TEST(Subgraphs, Examples) {
  std::vector<Vertex> vs{0, 1, 2};
  auto sub = induced_subgraph(complete_graph(4), vs);
  EXPECT_EQ(sub.graph, complete_graph(3));
  EXPECT_EQ(sub.original_of, vs);

  std::vector<Edge> pm{{0, 1}, {2, 3}};
  Graph c4 = remove_edges(complete_graph(4), pm);
  EXPECT_EQ(c4.num_edges(), 4u);
  EXPECT_TRUE(c4.is_regular());
  EXPECT_EQ(c4.max_degree(), 2u);

  std::vector<Vertex> zero{0};
  Graph k3 = remove_vertices_edges(complete_graph(4), zero);
  EXPECT_EQ(k3.num_vertices(), 4u);
  EXPECT_EQ(k3.num_edges(), 3u);
  EXPECT_EQ(k3.degree(0), 0u);
  EXPECT_TRUE(k3.has_edge(1, 2) && k3.has_edge(1, 3) && k3.has_edge(2, 3));
}

TEST(Subgraphs, Errors) {
  std::vector<Edge> missing{{0, 1}};
  Graph g = Graph::from_edge_list(3, std::vector<Edge>{{1, 2}});
  EXPECT_EQ(code_of([&] { remove_edges(g, missing); }), ErrorCode::UnknownEdge);
  std::vector<Vertex> bad{7};
  EXPECT_EQ(code_of([&] { remove_vertices_edges(g, bad); }), ErrorCode::UnknownVertex);
  EXPECT_EQ(code_of([&] { induced_subgraph(g, bad); }), ErrorCode::UnknownVertex);
  EXPECT_EQ(code_of([&] { edge_union(g, g); }), ErrorCode::DuplicateEdge);
}

TEST(Subgraphs, InduceAndRemoveCommute) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    Graph g = random_gnp(30, 0.3, s);
    Rng rng(s);
    std::vector<Vertex> vs;
    for (Vertex v = 0; v < 30; ++v)
      if (coin(rng, 0.6)) vs.push_back(v);
    std::vector<Edge> es;
    for (const Edge& e : g.edges())
      if (coin(rng, 0.3)) es.push_back(e);
    // Removing an edge outside the kept set is a no-op on the induced side.
    auto a = induced_subgraph(remove_edges(g, es), vs).graph;
    auto ind = induced_subgraph(g, vs);
    std::vector<Vertex> local(30, 0);
    std::vector<char> in(30, 0);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      local[vs[i]] = static_cast<Vertex>(i);
      in[vs[i]] = 1;
    }
    std::vector<Edge> inside;
    for (const Edge& e : es)
      if (in[e.u] && in[e.v]) inside.emplace_back(local[e.u], local[e.v]);
    auto b = remove_edges(ind.graph, inside);
    EXPECT_EQ(a, b);
  }
}

TEST(Verify, K4Factorization) {
  Graph k4 = complete_graph(4);
  Factorization f;
  f.matchings = {Matching({{0, 1}, {2, 3}}), Matching({{0, 2}, {1, 3}}), Matching({{0, 3}, {1, 2}})};
  EXPECT_TRUE(verify_factorization(k4, f, true).ok);

  f.matchings[1] = Matching({{0, 2}});
  auto rep = verify_factorization(k4, f, false);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.violation, Violation::UnionMismatch);
  EXPECT_EQ(to_string(rep.violation), "union mismatch");
}

TEST(Verify, RoundRobinK6) {
  Factorization f = testutil::round_robin(6);
  EXPECT_TRUE(testutil::validates(complete_graph(6), f, true));
  EXPECT_TRUE(verify_factorization(complete_graph(6), f, true).ok);
}

TEST(Verify, EachViolationKind) {
  Graph k4 = complete_graph(4);
  Factorization f = testutil::round_robin(4);

  Factorization bad = f;
  bad.matchings[0].edges = {Edge(0, 1), Edge(1, 2)};
  EXPECT_EQ(verify_factorization(k4, bad, false).violation, Violation::NotAMatching);

  bad = f;
  bad.matchings.push_back(f.matchings[0]);
  EXPECT_EQ(verify_factorization(k4, bad, false).violation, Violation::EdgeReuse);

  Graph c4 = testutil::cycle(4);
  EXPECT_EQ(verify_factorization(c4, f, false).violation, Violation::EdgeOutsideGraph);

  bad = f;
  bad.matchings[0] = Matching({{0, 3}});
  bad.matchings[2] = Matching({f.matchings[2].edges[0]});
  auto rep = verify_factorization(k4, bad, true);
  EXPECT_FALSE(rep.ok);
}

TEST(Verify, AgreesWithIndependentValidator) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const std::size_t n = 2 * (2 + uniform_index(rng, 4));
    Graph g = complete_graph(n);
    Factorization f = testutil::round_robin(n);
    switch (uniform_index(rng, 5)) {
      case 0: {
        auto& m = f.matchings[uniform_index(rng, f.size())];
        m.edges.erase(m.edges.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, m.size())));
        break;
      }
      case 1:
        std::swap(f.matchings[0].edges[0], f.matchings[1].edges[0]);
        break;
      case 2:
        f.matchings.pop_back();
        break;
      case 3: {
        std::vector<Edge> rm{f.matchings[0].edges[0]};
        g = remove_edges(g, rm);
        break;
      }
      default:
        break;
    }
    const bool perfect = coin(rng, 0.5);
    EXPECT_EQ(verify_factorization(g, f, perfect).ok, testutil::validates(g, f, perfect)) << s;
  }
}

TEST(Canonical, IdempotentAndOrderInvariant) {
  Factorization f = testutil::round_robin(8);
  Factorization c = canonicalize(f);
  EXPECT_EQ(canonical_text(canonicalize(c)), canonical_text(c));
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    Factorization g = f;
    std::shuffle(g.matchings.begin(), g.matchings.end(), rng);
    for (auto& m : g.matchings) std::shuffle(m.edges.begin(), m.edges.end(), rng);
    EXPECT_EQ(canonical_text(canonicalize(g)), canonical_text(c));
    EXPECT_EQ(canonical_hash(g), canonical_hash(f));
  }
  EXPECT_NE(canonical_hash(testutil::round_robin(6)), canonical_hash(testutil::round_robin(8)));
}

TEST(Canonical, TextShape) {
  Factorization f;
  f.matchings = {Matching({{2, 3}, {0, 1}}), Matching({{0, 2}, {1, 3}})};
  EXPECT_EQ(canonical_text(canonicalize(f)), "0-1 2-3\n0-2 1-3\n");
}

TEST(Io, EdgeListRoundTrip) {
  Graph g = random_regular(12, 5, 9);
  std::string text = edge_list_text(g);
  std::istringstream in(text);
  EXPECT_EQ(read_edge_list(in), g);
  EXPECT_EQ(edge_list_text(complete_graph(3)), "3 3\n0 1\n0 2\n1 2\n");
}

TEST(Io, FactorizationRoundTrip) {
  Factorization f = testutil::round_robin(6);
  std::string text = factorization_text(6, f);
  EXPECT_EQ(text.substr(0, 4), "6 5\n");
  std::istringstream in(text);
  auto [n, back] = read_factorization(in);
  EXPECT_EQ(n, 6u);
  EXPECT_EQ(factorization_text(6, back), text);
}

TEST(Io, ParseErrorsCarryLineNumbers) {
  std::istringstream in("2 1\na b\n");
  try {
    read_edge_list(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream short_in("3 2\n0 1\n");
  EXPECT_EQ(code_of([&] { read_edge_list(short_in); }), ErrorCode::ParseError);
  std::istringstream fbad("4 1\n0-1 2+3\n");
  EXPECT_EQ(code_of([&] { read_factorization(fbad); }), ErrorCode::ParseError);
}
