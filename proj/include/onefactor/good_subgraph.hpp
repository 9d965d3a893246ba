#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "onefactor/graph.hpp"
#include "onefactor/matching.hpp"

namespace onefactor {

struct GoodGraphProvenance {
  std::uint64_t seed = 0;
  double p = 0;
  double epsilon = 0;
  std::size_t rho_m_target = 0;  // floor(d/2 - eps m / 1000)
  std::size_t rho_m = 0;        // value actually used
  std::size_t k_target = 0;      // ceil((1 - eps/1000) rho_m_target p)
  std::size_t k = 0;            // value actually used (= r1)
  bool clipped = false;
  std::size_t attempts = 0;
  /// Asymptotic requirements that fail at this size, as readable lines.
  std::vector<std::string> constraint_notes;
};

/// An r1-regular balanced bipartite spanning subgraph, used downstream as if
/// it were (alpha, r1, m)-good. Perfect-matching requests against it go
/// through contract_matching, which counts failures.
struct GoodGraphCertificate {
  Graph host;
  Bipartition bip;
  double alpha = 0;
  std::size_t r1 = 0;
  std::size_t m = 0;
  GoodGraphProvenance provenance;
  std::size_t contract_failures = 0;
};

/// Random balanced split whose crossing graph has every degree within
/// d/2 +- slack * 5 sqrt(d ln n). Irregular input never passes (d is
/// undefined). Throws OddOrder or RetryBudgetExhausted.
Bipartition random_balanced_bipartition(const Graph& g, std::uint64_t seed,
                                        std::size_t retry_budget, double slack = 1.0);

/// Edges of g crossing bip, on the same vertex set.
Graph crossing_graph(const Graph& g, const Bipartition& bip);

/// Keeps each edge independently with probability p.
Graph sparsify(const Graph& g, double p, std::uint64_t seed);

struct ExtractOptions {
  std::size_t retry_budget = 20;
  double slack = 1.0;
  /// Lower rho_m to the crossing min degree and k to the largest feasible
  /// value when the exact targets have no factor.
  bool clip_to_feasible = false;
  /// Skip the d >= n/2 + eps n check.
  bool skip_density_check = false;
};

/// Bipartition, rho_m-factor of the crossing graph, p-sparsification, then
/// a k-factor of the sparse graph. Throws PreconditionViolated or
/// RetryBudgetExhausted.
GoodGraphCertificate extract_good(const Graph& g, double epsilon, double p, std::uint64_t seed,
                                  const ExtractOptions& options = {});

struct ExpansionReport {
  bool passed = true;
  double max_ratio = 0;
  std::size_t worst_size = 0;
  std::size_t trials = 0;
};

/// Random X in side_a and Y in side_b with |X| = |Y| <= m/2; reports the
/// largest e(X,Y) / (p m |X|). Passes iff it stays below c.
ExpansionReport spot_check_expansion(const Graph& gp, const Bipartition& bip, double c, double p,
                                     std::size_t trials, std::uint64_t seed);

struct ContractViolation {
  HallViolator witness;  // original vertex labels
};

/// Perfect matching of host minus `removed` (host defaults to cert.host).
/// On failure increments cert.contract_failures and returns the witness.
/// Throws UnbalancedParts when `removed` is unbalanced.
std::variant<Matching, ContractViolation> contract_matching(
    GoodGraphCertificate& cert, const std::vector<Vertex>& removed, double min_degree_floor,
    const Graph* host = nullptr, std::vector<std::string>* warnings = nullptr);

std::string certificate_to_json(const GoodGraphCertificate& cert);

}  // namespace onefactor
