#pragma once

#include <variant>

#include "onefactor/graph.hpp"

namespace onefactor {

/// A set X on one side with |N(X)| < |X|.
struct HallViolator {
  int side = 0;  // 0 for side_a, 1 for side_b
  std::vector<Vertex> witness;
  std::vector<Vertex> neighborhood;
};

/// True iff `hv` really is a Hall violator in g.
bool check_hall_violator(const Graph& g, const HallViolator& hv);

/// Source side of a minimum s-t cut of the r-factor flow network, reported as
/// the A and B vertices reachable from the source in the residual graph.
struct FlowCut {
  std::size_t max_flow = 0;
  std::size_t required = 0;
  std::vector<Vertex> source_side_a;
  std::vector<Vertex> source_side_b;
};

struct EdgeColoring {
  /// color_of[i] is the color of g.edges()[i].
  std::vector<std::size_t> color_of;
  std::size_t num_colors = 0;
};

/// Maximum matching by Hopcroft-Karp. Throws NotBipartite when some edge
/// does not cross `bip`.
Matching max_bipartite_matching(const Graph& g, const Bipartition& bip);

/// Perfect matching, or a Hall violator from the alternating reachability
/// set of the unmatched side_a vertices. Throws UnbalancedParts.
std::variant<Matching, HallViolator> perfect_bipartite_matching(const Graph& g,
                                                               const Bipartition& bip);

/// Spanning r-regular subgraph via integral max-flow, or the min cut.
std::variant<Graph, FlowCut> bipartite_r_factor(const Graph& g, const Bipartition& bip,
                                                std::size_t r);

/// Proper edge coloring with at most max_degree + 1 colors (Misra-Gries).
EdgeColoring misra_gries_color(const Graph& g);
bool is_proper_coloring(const Graph& g, const EdgeColoring& c);
/// Color classes, indexed by color.
std::vector<Matching> color_classes(const Graph& g, const EdgeColoring& c);

/// Largest color class (lowest color on ties) truncated to its k smallest
/// edges. Throws RequestTooLarge unless k <= ceil(m / (max_degree + 1)).
Matching large_matching_via_coloring(const Graph& g, std::size_t k);

/// Perfect matching from a Hamilton cycle built by path extension and
/// rotation. Throws OddOrder, DiracViolated or ConstructionFailed.
Matching dirac_perfect_matching(const Graph& g);
/// The Hamilton cycle itself as a vertex sequence (n >= 3).
std::vector<Vertex> dirac_hamilton_cycle(const Graph& g);

/// Splits a regular balanced bipartite graph into perfect matchings.
/// Throws NotRegular, UnbalancedParts or NotBipartite.
Factorization bipartite_regular_factorize(const Graph& g, const Bipartition& bip);

}  // namespace onefactor
