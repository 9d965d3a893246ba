#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "onefactor/good_subgraph.hpp"
#include "onefactor/graph.hpp"

namespace onefactor {

enum class CompletionMode {
  /// Sizes and pruning exactly as in the completion argument; M' always
  /// inside the current H view; a failed perfect matching asks for a new
  /// good graph.
  Strict,
  /// For small instances: inner matchings use the full largest color class,
  /// M' may fall back to all crossing edges of R_i, and a failed peel
  /// retries with a smaller inner target.
  DeskScale,
};

enum class CompletionPhase { Main, SingleEdge, BipartiteFinish, Done };

struct PeelTraceRow {
  std::size_t iteration = 0;
  std::size_t f = 0;
  std::size_t inner_size = 0;
  std::size_t retries = 0;
  bool used_crossing_fallback = false;
  CompletionPhase phase = CompletionPhase::Main;
};

struct CompletionState {
  Graph R;
  std::size_t r2 = 0;
  std::size_t f = 0;
  std::vector<Matching> peeled;
  CompletionPhase phase = CompletionPhase::Main;
  std::vector<PeelTraceRow> trace;
  std::size_t prune_retries = 0;
  std::size_t crossing_fallbacks = 0;
  std::size_t symmetry_checks = 0;
};

struct CompletionOptions {
  CompletionMode mode = CompletionMode::Strict;
  std::size_t retry_budget = 100;
};

struct CompletionResult {
  Factorization factorization;
  std::size_t main_peels = 0;
  std::size_t single_edge_peels = 0;
  std::size_t bipartite_matchings = 0;
  std::size_t prune_retries = 0;
  std::size_t crossing_fallbacks = 0;
  std::size_t symmetry_checks = 0;
  /// ceil(3 r2 ln m / alpha) + 1
  double main_peel_bound = 0;
  std::vector<std::string> notes;
  std::vector<PeelTraceRow> trace;
};

/// Edges of R inside one side: (R[A], R[B]) on the full vertex set.
std::pair<Graph, Graph> side_graphs(const Graph& R, const Bipartition& bip);

/// Matchings of size ceil(f / (r2 + 1)) in R[A] and R[B]. Throws
/// RequestTooLarge when a side has max degree above r2.
std::pair<Matching, Matching> inner_matchings(const Graph& R, const Bipartition& bip,
                                              std::size_t r2);

struct PruneResult {
  Matching a;
  Matching b;
  std::size_t retries = 0;
};

/// Subsamples each large M_X with probability 3 alpha / 4 until both keep at
/// least floor(alpha f / 2 r2) edges and no vertex has more than
/// 3 alpha r1 / 2 H-neighbors among the kept endpoints; then keeps the
/// smallest floor(alpha f / 2 r2) edges of each. Throws RetryBudgetExhausted.
PruneResult prune_matchings(const Matching& ma, const Matching& mb, const Graph& H, double alpha,
                            std::size_t r1, std::size_t r2, std::size_t f, std::uint64_t seed,
                            std::size_t retry_budget);

/// Checks H within R, R regular, f symmetric; r2 = deg(R) - r1.
CompletionState make_completion_state(const GoodGraphCertificate& cert, const Graph& R);

/// One main-phase peel. Moves to SingleEdge when the pruned target is 0.
CompletionState peel_once(CompletionState state, GoodGraphCertificate& cert, std::uint64_t seed,
                          const CompletionOptions& options = {});
/// Single-edge peels until f = 0.
CompletionState finish_single_edges(CompletionState state, GoodGraphCertificate& cert,
                                    const CompletionOptions& options = {});
/// Factorizes the bipartite remainder and appends it to the peeled list.
Factorization finish_bipartite(CompletionState state, const Bipartition& bip);

/// Full 1-factorization of R. Throws ResampleGoodGraph, RetryBudgetExhausted
/// or InvariantBroken.
CompletionResult complete(GoodGraphCertificate& cert, const Graph& R, std::uint64_t seed,
                          const CompletionOptions& options = {});

void write_peel_trace_csv(std::ostream& out, const std::vector<PeelTraceRow>& trace);

}  // namespace onefactor
