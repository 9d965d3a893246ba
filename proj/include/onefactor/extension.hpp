#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "onefactor/error.hpp"
#include "onefactor/graph.hpp"

namespace onefactor {

struct ExtensionInstance {
  Graph H;
  std::vector<Vertex> U;
  std::vector<Vertex> W;
  /// Matchings of H[U], in H's labels.
  std::vector<Matching> matchings;
  /// H edges that must not be used.
  std::vector<Edge> used_edges;
};

/// Numbers the hypotheses are checked against. The module never
/// derives these from K; callers pass whatever their scale needs.
struct ExtensionThresholds {
  /// delta(H[W]) >= (1/2 + tau/2) |W|
  double tau = 0;
  std::size_t min_edges_into_w = 0;
  /// (a) each M_i leaves at most this many U vertices uncovered
  std::size_t max_uncovered = std::numeric_limits<std::size_t>::max();
  /// (b) each u is uncovered by at most this many M_i
  std::size_t max_misses = std::numeric_limits<std::size_t>::max();
  std::size_t max_t = std::numeric_limits<std::size_t>::max();
};

struct HypothesisReport {
  bool w_even = true;
  bool w_degree_ok = true;
  bool w_edges_ok = true;
  bool coverage_ok = true;
  bool equitability_ok = true;
  bool count_ok = true;
  std::size_t min_w_degree = 0;
  std::size_t min_edges_into_w = 0;
  std::size_t max_uncovered = 0;
  std::size_t max_misses = 0;

  bool all_ok() const {
    return w_even && w_degree_ok && w_edges_ok && coverage_ok && equitability_ok && count_ok;
  }
};

struct ExtensionFailure {
  ErrorCode code = ErrorCode::GreedyStuck;
  std::size_t matching_index = 0;
  std::string diagnostic;
};

struct ExtensionResult {
  /// Perfect matchings of H, one per input matching that was extended.
  std::vector<Matching> outputs;
  std::optional<ExtensionFailure> failure;
  HypothesisReport hypotheses;
};

/// Measures the hypotheses; never throws on a miss.
HypothesisReport check_hypotheses(const ExtensionInstance& inst, const ExtensionThresholds& th);

/// Extends matchings in order and stops at the first one that cannot be
/// extended. Throws PreconditionViolated on a malformed instance and
/// InvariantBroken if an output is not perfect or reuses an edge.
ExtensionResult extend_prefix(const ExtensionInstance& inst, const ExtensionThresholds& th = {});

/// As extend_prefix, but a stuck matching throws GreedyStuck or DiracViolated.
std::vector<Matching> extend_all(const ExtensionInstance& inst, const ExtensionThresholds& th = {});

/// Edges of m with both ends in U.
Matching restrict_to(const Matching& m, const std::vector<Vertex>& U, std::size_t n);

/// Restriction law: outputs[i] restricted to U equals inputs[i] for all i.
bool restriction_law_holds(const std::vector<Matching>& inputs,
                           const std::vector<Matching>& outputs, const std::vector<Vertex>& U,
                           std::size_t n);

/// True iff the two output collections differ, decided by restricting them
/// to U and comparing with the inputs.
bool check_distinctness(const std::vector<Matching>& in_a, const std::vector<Matching>& in_b,
                        const std::vector<Matching>& out_a, const std::vector<Matching>& out_b,
                        const std::vector<Vertex>& U, std::size_t n);

}  // namespace onefactor
