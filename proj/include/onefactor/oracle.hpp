#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "onefactor/graph.hpp"

namespace onefactor {

using BigInt = boost::multiprecision::cpp_int;

/// Every perfect matching of g. Throws OddOrder, or TooLarge above `cap`
/// vertices.
std::vector<Matching> enumerate_perfect_matchings(const Graph& g, std::size_t cap = 16);

/// Number of perfect matchings, memoized over covered-vertex masks.
std::uint64_t count_perfect_matchings(const Graph& g, std::size_t cap = 24);

/// 0/1 matrix a[i][j] = [side_a[i] ~ side_b[j]]. Throws UnbalancedParts.
std::vector<std::vector<char>> bipartite_adjacency(const Graph& g, const Bipartition& bip);

/// Permanent by Ryser's inclusion-exclusion over a Gray code. Throws
/// TooLarge above `cap` rows.
BigInt ryser_permanent(const std::vector<std::vector<char>>& a, std::size_t cap = 28);

enum class CountMode { Ordered, Unordered };

struct FactorizationCaps {
  std::size_t max_vertices = 16;
  /// Residual edge sets are 64-bit masks.
  std::size_t max_edges = 64;
};

/// Exact 1-factorization count. Throws NotRegular, OddOrder or TooLarge.
BigInt count_one_factorizations(const Graph& g, CountMode mode, const FactorizationCaps& caps = {});

/// Calls `visit` once per unordered 1-factorization, in canonical form.
/// Returns the number visited.
std::uint64_t for_each_factorization(const Graph& g,
                                     const std::function<void(const Factorization&)>& visit,
                                     const FactorizationCaps& caps = {});

struct CountReport {
  std::uint64_t perfect_matchings = 0;
  BigInt factorizations_unordered = 0;
  BigInt factorizations_ordered = 0;
  std::optional<std::vector<Factorization>> witnesses;
};

/// Both counts, with ordered == unordered * d! checked (InvariantBroken).
CountReport count_report(const Graph& g, bool with_witnesses = false,
                         const FactorizationCaps& caps = {});

struct BoundComparison {
  BigInt exact = 0;
  double log_exact = 0;
  double log_bound = 0;       // with (1 - n^{-1/C}) when C is given
  double log_simplified = 0;  // (d / e^2)^{dn/2}
  bool passed = false;
};

BoundComparison bound_comparison(const Graph& g, std::optional<double> C = std::nullopt,
                                 const FactorizationCaps& caps = {});

}  // namespace onefactor
