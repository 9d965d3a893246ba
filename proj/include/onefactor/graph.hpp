#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace onefactor {

using Vertex = std::uint32_t;

/// Unordered vertex pair, always stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  bool contains(Vertex x) const { return u == x || v == x; }
  Vertex other(Vertex x) const { return x == u ? v : u; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{e.u} << 32) | e.v);
  }
};

/// Immutable simple undirected graph on vertices 0..n-1.
///
/// Edges are kept sorted in canonical order; neighbor lists are sorted too, so
/// iteration order (and therefore every algorithm built on top) is
/// deterministic.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adjacency_(n) {}

  /// Builds a graph from a pair list. Throws SelfLoop, DuplicateEdge or
  /// VertexOutOfRange.
  static Graph from_edge_list(std::size_t n, std::span<const Edge> pairs);
  static Graph from_edge_list(std::size_t n,
                              std::span<const std::pair<Vertex, Vertex>> pairs);

  std::size_t num_vertices() const { return adjacency_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_[v]; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }

  bool has_edge(Vertex a, Vertex b) const;
  bool has_edge(const Edge& e) const { return has_edge(e.u, e.v); }

  /// Position of `e` in edges(), or num_edges() when absent.
  std::size_t edge_index(const Edge& e) const;

  std::size_t min_degree() const;
  std::size_t max_degree() const;
  bool is_regular() const;
  std::vector<std::size_t> degrees() const;

  /// Skips validation: `edges` must be canonical, sorted, unique and in
  /// range.
  static Graph from_sorted_unique(std::size_t n, std::vector<Edge> edges);

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.edges_ == b.edges_ && a.num_vertices() == b.num_vertices();
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

Graph complete_graph(std::size_t n);
/// K_{a,b} with parts 0..a-1 and a..a+b-1.
Graph complete_bipartite(std::size_t a, std::size_t b);

struct InducedSubgraph {
  Graph graph;
  /// original_of[i] is the original label of subgraph vertex i.
  std::vector<Vertex> original_of;
};

/// Order-preserving relabeling of the selected vertices to 0..|vs|-1.
InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> vs);
/// Same vertex set, given edges dropped. Throws UnknownEdge.
Graph remove_edges(const Graph& g, std::span<const Edge> es);
/// Same vertex set, every edge touching `vs` dropped. Throws UnknownVertex.
Graph remove_vertices_edges(const Graph& g, std::span<const Vertex> vs);
/// Union of two edge-disjoint graphs on the same vertex set. Throws
/// DuplicateEdge on overlap.
Graph edge_union(const Graph& a, const Graph& b);
/// Graph on n vertices holding exactly the given edges (a subgraph view).
Graph subgraph_from_edges(std::size_t n, std::vector<Edge> edges);

/// Two sides of a vertex split; side_of[v] is 0 for side_a and 1 for side_b.
struct Bipartition {
  std::vector<Vertex> side_a;
  std::vector<Vertex> side_b;

  static Bipartition from_sides(std::size_t n, std::vector<Vertex> a,
                                std::vector<Vertex> b);
  /// Canonical split 0..a-1 | a..a+b-1, as produced by complete_bipartite.
  static Bipartition canonical(std::size_t a, std::size_t b);

  std::size_t num_vertices() const { return side_of_.size(); }
  int side_of(Vertex v) const { return side_of_[v]; }
  bool balanced() const { return side_a.size() == side_b.size(); }
  bool crosses(const Edge& e) const { return side_of_[e.u] != side_of_[e.v]; }

 private:
  std::vector<int> side_of_;
};

/// A set of pairwise vertex-disjoint edges, kept sorted.
struct Matching {
  std::vector<Edge> edges;

  Matching() = default;
  explicit Matching(std::vector<Edge> es);

  std::size_t size() const { return edges.size(); }
  bool empty() const { return edges.empty(); }

  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching&, const Matching&) = default;
};

bool is_matching(std::span<const Edge> edges, std::size_t n);
/// Vertices covered by the matching, as a 0/1 vector over 0..n-1.
std::vector<char> covered_vertices(const Matching& m, std::size_t n);

/// An ordered list of matchings intended to partition a host edge set.
struct Factorization {
  std::vector<Matching> matchings;

  std::size_t size() const { return matchings.size(); }
};

enum class Violation {
  None,
  NotAMatching,
  EdgeReuse,
  EdgeOutsideGraph,
  UnionMismatch,
  NotPerfect,
};

std::string_view to_string(Violation v);

struct VerifyReport {
  bool ok = true;
  Violation violation = Violation::None;
  std::size_t matching_index = 0;
  Edge edge{};
  std::string message;
};

/// Checks that `f` partitions E(g) into matchings (perfect ones when
/// `require_perfect`). Reports the first violation found.
VerifyReport verify_factorization(const Graph& g, const Factorization& f,
                                  bool require_perfect);

/// Canonical unordered form: edges inside each matching sorted, matchings
/// sorted lexicographically.
Factorization canonicalize(Factorization f);
std::string canonical_text(const Factorization& f);
/// 64-bit FNV-1a of canonical_text(canonicalize(f)).
std::uint64_t canonical_hash(const Factorization& f);

}  // namespace onefactor
