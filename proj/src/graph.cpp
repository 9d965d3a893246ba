#include "onefactor/graph.hpp"

#include <algorithm>
#include <sstream>

#include "onefactor/error.hpp"

namespace onefactor {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::InfeasibleDegree: return "InfeasibleDegree";
    case ErrorCode::RetryBudgetExhausted: return "RetryBudgetExhausted";
    case ErrorCode::NotBipartite: return "NotBipartiteAgainstGivenParts";
    case ErrorCode::UnbalancedParts: return "UnbalancedParts";
    case ErrorCode::RequestTooLarge: return "RequestTooLarge";
    case ErrorCode::DiracViolated: return "DiracViolated";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ResampleGoodGraph: return "ResampleGoodGraph";
    case ErrorCode::InvariantBroken: return "InvariantBroken";
    case ErrorCode::GreedyStuck: return "GreedyStuck";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OddOrder: return "OddOrder";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::NotAMatching: return "not a matching";
    case Violation::EdgeReuse: return "edge reuse";
    case Violation::EdgeOutsideGraph: return "edge outside graph";
    case Violation::UnionMismatch: return "union mismatch";
    case Violation::NotPerfect: return "matching not perfect";
  }
  return "unknown";
}

namespace {

std::string edge_text(const Edge& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

}  // namespace

Graph Graph::from_sorted_unique(std::size_t n, std::vector<Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) {
    g.adjacency_[e.u].push_back(e.v);
    g.adjacency_[e.v].push_back(e.u);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  g.edges_ = std::move(edges);
  return g;
}

Graph Graph::from_edge_list(std::size_t n, std::span<const Edge> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const Edge& e : pairs) {
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::VertexOutOfRange,
                  edge_text(e) + " with n=" + std::to_string(n));
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, edge_text(e));
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) throw Error(ErrorCode::DuplicateEdge, edge_text(*dup));
  return from_sorted_unique(n, std::move(edges));
}

Graph Graph::from_edge_list(std::size_t n,
                            std::span<const std::pair<Vertex, Vertex>> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a == b && a < n) throw Error(ErrorCode::SelfLoop, edge_text(Edge(a, b)));
    edges.emplace_back(a, b);
  }
  return from_edge_list(n, std::span<const Edge>(edges));
}

bool Graph::has_edge(Vertex a, Vertex b) const {
  if (a >= num_vertices() || b >= num_vertices() || a == b) return false;
  const auto& nbrs = adjacency_[a].size() <= adjacency_[b].size()
                         ? adjacency_[a]
                         : adjacency_[b];
  Vertex target = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
  return std::binary_search(nbrs.begin(), nbrs.end(), target);
}

std::size_t Graph::edge_index(const Edge& e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return edges_.size();
  return static_cast<std::size_t>(it - edges_.begin());
}

std::size_t Graph::min_degree() const {
  std::size_t best = adjacency_.empty() ? 0 : adjacency_[0].size();
  for (const auto& nbrs : adjacency_) best = std::min(best, nbrs.size());
  return best;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& nbrs : adjacency_) best = std::max(best, nbrs.size());
  return best;
}

bool Graph::is_regular() const { return min_degree() == max_degree(); }

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(adjacency_.size());
  for (std::size_t v = 0; v < adjacency_.size(); ++v) out[v] = adjacency_[v].size();
  return out;
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  edges.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_sorted_unique(n, std::move(edges));
}

Graph complete_bipartite(std::size_t a, std::size_t b) {
  std::vector<Edge> edges;
  edges.reserve(a * b);
  for (Vertex u = 0; u < a; ++u) {
    for (Vertex v = 0; v < b; ++v) edges.emplace_back(u, static_cast<Vertex>(a + v));
  }
  return Graph::from_sorted_unique(a + b, std::move(edges));
}

InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> vs) {
  std::vector<Vertex> selected(vs.begin(), vs.end());
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  constexpr Vertex kAbsent = ~Vertex{0};
  std::vector<Vertex> new_label(g.num_vertices(), kAbsent);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] >= g.num_vertices()) {
      throw Error(ErrorCode::UnknownVertex, std::to_string(selected[i]));
    }
    new_label[selected[i]] = static_cast<Vertex>(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (new_label[e.u] != kAbsent && new_label[e.v] != kAbsent) {
      edges.emplace_back(new_label[e.u], new_label[e.v]);
    }
  }
  // Order-preserving relabeling keeps canonical order intact.
  return {Graph::from_sorted_unique(selected.size(), std::move(edges)),
          std::move(selected)};
}

Graph remove_edges(const Graph& g, std::span<const Edge> es) {
  std::vector<char> drop(g.num_edges(), 0);
  for (const Edge& e : es) {
    std::size_t idx = g.edge_index(e);
    if (idx == g.num_edges()) throw Error(ErrorCode::UnknownEdge, edge_text(e));
    drop[idx] = 1;
  }
  std::vector<Edge> kept;
  kept.reserve(g.num_edges());
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    if (!drop[i]) kept.push_back(g.edges()[i]);
  }
  return Graph::from_sorted_unique(g.num_vertices(), std::move(kept));
}

Graph remove_vertices_edges(const Graph& g, std::span<const Vertex> vs) {
  std::vector<char> gone(g.num_vertices(), 0);
  for (Vertex v : vs) {
    if (v >= g.num_vertices()) throw Error(ErrorCode::UnknownVertex, std::to_string(v));
    gone[v] = 1;
  }
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (!gone[e.u] && !gone[e.v]) kept.push_back(e);
  }
  return Graph::from_sorted_unique(g.num_vertices(), std::move(kept));
}

Graph edge_union(const Graph& a, const Graph& b) {
  if (a.num_vertices() != b.num_vertices()) {
    throw Error(ErrorCode::VertexOutOfRange, "edge_union on different vertex sets");
  }
  std::vector<Edge> merged;
  merged.reserve(a.num_edges() + b.num_edges());
  std::merge(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(),
             std::back_inserter(merged));
  auto dup = std::adjacent_find(merged.begin(), merged.end());
  if (dup != merged.end()) throw Error(ErrorCode::DuplicateEdge, edge_text(*dup));
  return Graph::from_sorted_unique(a.num_vertices(), std::move(merged));
}

Graph subgraph_from_edges(std::size_t n, std::vector<Edge> edges) {
  return Graph::from_edge_list(n, std::span<const Edge>(edges));
}

Bipartition Bipartition::from_sides(std::size_t n, std::vector<Vertex> a,
                                    std::vector<Vertex> b) {
  Bipartition bip;
  bip.side_of_.assign(n, -1);
  for (Vertex v : a) {
    if (v >= n) throw Error(ErrorCode::UnknownVertex, std::to_string(v));
    if (bip.side_of_[v] != -1) {
      throw Error(ErrorCode::NotBipartite, "vertex " + std::to_string(v) + " listed twice");
    }
    bip.side_of_[v] = 0;
  }
  for (Vertex v : b) {
    if (v >= n) throw Error(ErrorCode::UnknownVertex, std::to_string(v));
    if (bip.side_of_[v] != -1) {
      throw Error(ErrorCode::NotBipartite, "vertex " + std::to_string(v) + " on both sides");
    }
    bip.side_of_[v] = 1;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (bip.side_of_[v] == -1) {
      throw Error(ErrorCode::NotBipartite, "vertex " + std::to_string(v) + " on no side");
    }
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  bip.side_a = std::move(a);
  bip.side_b = std::move(b);
  return bip;
}

Bipartition Bipartition::canonical(std::size_t a, std::size_t b) {
  std::vector<Vertex> sa(a), sb(b);
  for (std::size_t i = 0; i < a; ++i) sa[i] = static_cast<Vertex>(i);
  for (std::size_t i = 0; i < b; ++i) sb[i] = static_cast<Vertex>(a + i);
  return from_sides(a + b, std::move(sa), std::move(sb));
}

Matching::Matching(std::vector<Edge> es) : edges(std::move(es)) {
  std::sort(edges.begin(), edges.end());
}

bool is_matching(std::span<const Edge> edges, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n || e.u == e.v) return false;
    if (seen[e.u] || seen[e.v]) return false;
    seen[e.u] = seen[e.v] = 1;
  }
  return true;
}

std::vector<char> covered_vertices(const Matching& m, std::size_t n) {
  std::vector<char> covered(n, 0);
  for (const Edge& e : m.edges) covered[e.u] = covered[e.v] = 1;
  return covered;
}

VerifyReport verify_factorization(const Graph& g, const Factorization& f,
                                  bool require_perfect) {
  VerifyReport report;
  auto fail = [&](Violation v, std::size_t idx, Edge e, std::string msg) {
    report.ok = false;
    report.violation = v;
    report.matching_index = idx;
    report.edge = e;
    report.message = std::string(to_string(v)) + ": " + std::move(msg);
    return report;
  };

  const std::size_t n = g.num_vertices();
  std::vector<int> owner(g.num_edges(), -1);
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < f.matchings.size(); ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    for (const Edge& e : f.matchings[i].edges) {
      if (e.u >= n || e.v >= n || e.u == e.v) {
        return fail(Violation::EdgeOutsideGraph, i, e,
                    edge_text(e) + " in matching " + std::to_string(i));
      }
      if (seen[e.u] || seen[e.v]) {
        return fail(Violation::NotAMatching, i, e,
                    "matching " + std::to_string(i) + " reuses a vertex of " + edge_text(e));
      }
      seen[e.u] = seen[e.v] = 1;
      std::size_t idx = g.edge_index(e);
      if (idx == g.num_edges()) {
        return fail(Violation::EdgeOutsideGraph, i, e,
                    edge_text(e) + " in matching " + std::to_string(i));
      }
      if (owner[idx] != -1) {
        return fail(Violation::EdgeReuse, i, e,
                    edge_text(e) + " in matchings " + std::to_string(owner[idx]) +
                        " and " + std::to_string(i));
      }
      owner[idx] = static_cast<int>(i);
    }
  }
  for (std::size_t idx = 0; idx < g.num_edges(); ++idx) {
    if (owner[idx] == -1) {
      return fail(Violation::UnionMismatch, 0, g.edges()[idx],
                  edge_text(g.edges()[idx]) + " is not covered");
    }
  }
  if (require_perfect) {
    for (std::size_t i = 0; i < f.matchings.size(); ++i) {
      if (2 * f.matchings[i].size() != n) {
        return fail(Violation::NotPerfect, i, Edge{},
                    "matching " + std::to_string(i) + " has " +
                        std::to_string(f.matchings[i].size()) + " edges on " +
                        std::to_string(n) + " vertices");
      }
    }
  }
  return report;
}

Factorization canonicalize(Factorization f) {
  for (auto& m : f.matchings) std::sort(m.edges.begin(), m.edges.end());
  std::sort(f.matchings.begin(), f.matchings.end());
  return f;
}

std::string canonical_text(const Factorization& f) {
  std::ostringstream out;
  for (const auto& m : f.matchings) {
    bool first = true;
    for (const Edge& e : m.edges) {
      if (!first) out << ' ';
      out << e.u << '-' << e.v;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

std::uint64_t canonical_hash(const Factorization& f) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical_text(canonicalize(f))) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace onefactor
