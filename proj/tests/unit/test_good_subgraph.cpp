#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/good_subgraph.hpp"

using namespace onefactor;

namespace {

void expect_regular_bipartite_subgraph(const Graph& h, const Graph& g, const Bipartition& bip,
                                       std::size_t r) {
  EXPECT_TRUE(h.is_regular());
  EXPECT_EQ(h.max_degree(), r);
  for (const Edge& e : h.edges()) {
    EXPECT_TRUE(g.has_edge(e));
    EXPECT_TRUE(bip.crosses(e));
  }
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvariantBroken;
}

}  // namespace

TEST(Bipartition, K4GivesFourCycle) {
  Graph g = complete_graph(4);
  Bipartition bip = random_balanced_bipartition(g, 1, 20);
  EXPECT_TRUE(bip.balanced());
  Graph c = crossing_graph(g, bip);
  EXPECT_EQ(c.num_edges(), 4u);
  EXPECT_TRUE(c.is_regular());
  EXPECT_EQ(c.max_degree(), 2u);
}

TEST(Bipartition, K200DegreeWindow) {
  Graph g = complete_graph(200);
  Bipartition bip = random_balanced_bipartition(g, 5, 20);
  Graph c = crossing_graph(g, bip);
  const double win = 5 * std::sqrt(199 * std::log(200.0));
  EXPECT_GE(static_cast<double>(c.min_degree()), 199 / 2.0 - win);
  EXPECT_LE(static_cast<double>(c.max_degree()), 199 / 2.0 + win);
}

TEST(Bipartition, IrregularInputExhaustsBudget) {
  Graph star = Graph::from_edge_list(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  EXPECT_EQ(code_of([&] { random_balanced_bipartition(star, 1, 10); }),
            ErrorCode::RetryBudgetExhausted);
  EXPECT_EQ(code_of([&] { random_balanced_bipartition(complete_graph(5), 1, 10); }),
            ErrorCode::OddOrder);
}

TEST(Sparsify, KeepFrequency) {
  Graph g = complete_graph(300);
  const double p = 0.3;
  Graph s = sparsify(g, p, 4);
  const double m = static_cast<double>(g.num_edges());
  const double sigma = std::sqrt(m * p * (1 - p));
  EXPECT_LT(std::abs(static_cast<double>(s.num_edges()) - p * m), 5 * sigma);
  for (const Edge& e : s.edges()) EXPECT_TRUE(g.has_edge(e));
  EXPECT_EQ(sparsify(g, p, 4), s);
  EXPECT_EQ(sparsify(g, 1.0, 4), g);
}

TEST(ExtractGood, ClippedOnK60) {
  Graph g = complete_graph(60);
  ExtractOptions opt;
  opt.clip_to_feasible = true;
  GoodGraphCertificate cert = extract_good(g, 0.3, 0.5, 2, opt);
  EXPECT_EQ(cert.m, 30u);
  EXPECT_DOUBLE_EQ(cert.alpha, 0.03);
  EXPECT_EQ(cert.provenance.rho_m_target, 29u);
  EXPECT_EQ(cert.provenance.k_target, 15u);
  EXPECT_LE(cert.provenance.k, cert.provenance.k_target);
  EXPECT_EQ(cert.r1, cert.provenance.k);
  EXPECT_GE(cert.r1, 1u);
  expect_regular_bipartite_subgraph(cert.host, g, cert.bip, cert.r1);
  EXPECT_EQ(cert.host.num_vertices(), 60u);
}

TEST(ExtractGood, UnclippedTargetIsInfeasibleHere) {
  // The sparse graph is a p-thinning of a 29-regular graph; some vertex keeps
  // fewer than 15 edges almost surely, so no 15-factor exists.
  Graph g = complete_graph(60);
  ExtractOptions opt;
  opt.retry_budget = 5;
  EXPECT_EQ(code_of([&] { extract_good(g, 0.3, 0.5, 2, opt); }), ErrorCode::RetryBudgetExhausted);
}

TEST(ExtractGood, NoSparsification) {
  Graph g = random_regular(80, 70, 3);
  ExtractOptions opt;
  opt.clip_to_feasible = true;
  GoodGraphCertificate cert = extract_good(g, 0.1, 1.0, 3, opt);
  const double lo = 70 / 2.0 - 5 * std::sqrt(70 * std::log(80.0)) - 1;
  EXPECT_GE(static_cast<double>(cert.r1), std::max(1.0, lo));
  EXPECT_LE(cert.r1, 35u);
  expect_regular_bipartite_subgraph(cert.host, g, cert.bip, cert.r1);
}

TEST(ExtractGood, Preconditions) {
  EXPECT_EQ(code_of([&] { extract_good(random_regular(40, 10, 1), 0.1, 0.5, 1); }),
            ErrorCode::PreconditionViolated);
  EXPECT_EQ(code_of([&] { extract_good(complete_graph(7), 0.1, 0.5, 1); }),
            ErrorCode::PreconditionViolated);
  EXPECT_EQ(code_of([&] { extract_good(complete_graph(8), 0.0, 0.5, 1); }),
            ErrorCode::PreconditionViolated);
  EXPECT_EQ(code_of([&] { extract_good(complete_graph(8), 0.1, 1.5, 1); }),
            ErrorCode::PreconditionViolated);
  Graph path = Graph::from_edge_list(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(code_of([&] { extract_good(path, 0.1, 0.5, 1); }), ErrorCode::PreconditionViolated);
}

TEST(Expansion, EmptyAndComplete) {
  Bipartition bip = Bipartition::canonical(20, 20);
  ExpansionReport empty = spot_check_expansion(Graph(40), bip, 0.9, 0.5, 30, 1);
  EXPECT_TRUE(empty.passed);
  EXPECT_EQ(empty.max_ratio, 0.0);

  ExpansionReport full = spot_check_expansion(complete_bipartite(20, 20), bip, 0.9, 1.0, 30, 1);
  EXPECT_NEAR(full.max_ratio, 0.5, 1e-12);
  EXPECT_EQ(full.worst_size, 10u);
  EXPECT_TRUE(full.passed);
  EXPECT_FALSE(spot_check_expansion(complete_bipartite(20, 20), bip, 0.4, 1.0, 30, 1).passed);
}

TEST(Expansion, SparsifiedCompleteBipartite) {
  Bipartition bip = Bipartition::canonical(100, 100);
  Graph gp = sparsify(complete_bipartite(100, 100), 0.3, 8);
  ExpansionReport rep = spot_check_expansion(gp, bip, 0.7, 0.3, 200, 2);
  EXPECT_EQ(rep.trials, 200u);
  EXPECT_TRUE(rep.passed) << rep.max_ratio;
  EXPECT_LT(rep.max_ratio, 0.7);
}

namespace {

GoodGraphCertificate cert_on(Graph host, std::size_t m) {
  GoodGraphCertificate cert;
  cert.host = std::move(host);
  cert.bip = Bipartition::canonical(m, m);
  cert.m = m;
  cert.alpha = 0.1;
  cert.r1 = cert.host.max_degree();
  return cert;
}

}  // namespace

TEST(ContractMatching, SucceedsOnCompleteBipartite) {
  GoodGraphCertificate cert = cert_on(complete_bipartite(3, 3), 3);
  auto res = contract_matching(cert, {0, 3}, 0);
  ASSERT_TRUE(std::holds_alternative<Matching>(res));
  const Matching& mm = std::get<Matching>(res);
  EXPECT_EQ(mm.size(), 2u);
  for (const Edge& e : mm.edges) {
    EXPECT_FALSE(e.contains(0));
    EXPECT_FALSE(e.contains(3));
    EXPECT_TRUE(cert.host.has_edge(e));
  }
  EXPECT_EQ(cert.contract_failures, 0u);
}

TEST(ContractMatching, FailureIsCountedWithWitness) {
  // Host is a perfect matching 0-4, 1-5, 2-6, 3-7. Removing 0 and 5 strands 1.
  GoodGraphCertificate cert =
      cert_on(Graph::from_edge_list(8, std::vector<Edge>{{0, 4}, {1, 5}, {2, 6}, {3, 7}}), 4);
  std::vector<std::string> warnings;
  auto res = contract_matching(cert, {0, 5}, 1.0, nullptr, &warnings);
  ASSERT_TRUE(std::holds_alternative<ContractViolation>(res));
  EXPECT_EQ(cert.contract_failures, 1u);
  const HallViolator& hv = std::get<ContractViolation>(res).witness;
  EXPECT_LT(hv.neighborhood.size(), hv.witness.size());
  EXPECT_FALSE(warnings.empty());
}

TEST(ContractMatching, UnbalancedRemoval) {
  GoodGraphCertificate cert = cert_on(complete_bipartite(3, 3), 3);
  EXPECT_EQ(code_of([&] { contract_matching(cert, {0, 1}, 0); }), ErrorCode::UnbalancedParts);
}

TEST(ContractMatching, AlternateHost) {
  GoodGraphCertificate cert = cert_on(Graph(6), 3);
  Graph other = complete_bipartite(3, 3);
  auto res = contract_matching(cert, {}, 0, &other);
  ASSERT_TRUE(std::holds_alternative<Matching>(res));
  EXPECT_EQ(std::get<Matching>(res).size(), 3u);
}
