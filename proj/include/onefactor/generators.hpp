#pragma once

#include <cstdint>

#include "onefactor/graph.hpp"

namespace onefactor {

/// Random simple d-regular graph on n vertices. Random pairing of degree
/// points with rejection of loops and repeated edges; a stuck tail is repaired
/// by edge switches. Pairs present in `avoid` are never used.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                     std::size_t retry_budget = 64, const Graph* avoid = nullptr);

/// Random d-regular bipartite graph on m + m vertices with the canonical split
/// 0..m-1 | m..2m-1: a circulant start mixed by degree-preserving swaps.
Graph random_regular_bipartite(std::size_t m, std::size_t d, std::uint64_t seed);

/// Each pair independently with probability p.
Graph random_gnp(std::size_t n, double p, std::uint64_t seed);
/// Each of the a*b cross pairs independently with probability p, split
/// 0..a-1 | a..a+b-1.
Graph random_bipartite(std::size_t a, std::size_t b, double p, std::uint64_t seed);

/// Uniform random relabeling of the vertices.
Graph permute_vertices(const Graph& g, std::uint64_t seed);

}  // namespace onefactor
