#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "onefactor/graph.hpp"

namespace onefactor {

/// Reservoir memberships. Indices are 0-based: S[v] is a sorted K-subset of
/// 0..K^3-1 and W[i] = {v : i in S[v]}, sorted.
struct Reservoirs {
  std::size_t K = 0;
  std::vector<std::vector<std::uint32_t>> S;
  std::vector<std::vector<Vertex>> W;
};

/// Throws BadK when K == 0 or K^3 exceeds `max_parts` (default: n).
Reservoirs sample_reservoirs(const Graph& g, std::size_t K, std::uint64_t seed,
                             std::optional<std::size_t> max_parts = std::nullopt);

/// Drops the highest-index vertex of every odd W_i.
std::vector<std::vector<Vertex>> evenize(std::vector<std::vector<Vertex>> W, const Graph& g);

struct ReservoirStats {
  /// Y[v]: neighbors u of v with {u, v} inside some W_j.
  std::vector<std::size_t> Y;
  /// Z[i][v]: neighbors u of v with u in W_i and {u, v} inside some W_j.
  std::vector<std::vector<std::size_t>> Z;
};

ReservoirStats compute_stats(const Graph& g, const std::vector<std::vector<std::uint32_t>>& S,
                             const std::vector<std::vector<Vertex>>& W);

/// Label per edge of g (indexed as g.edges()): the lowest i with the edge
/// inside W_i, otherwise a uniform draw from 0..K^3-1 in edge order.
std::vector<std::uint32_t> assign_labels(const Graph& g, const std::vector<std::vector<Vertex>>& W,
                                         std::size_t parts, std::uint64_t seed);

struct ConclusionCheck {
  bool passed = true;
  std::string detail;
};

struct PartitionReport {
  std::array<ConclusionCheck, 4> conclusions;
  bool degenerate = false;
  double slack = 1.0;
  std::size_t attempts = 0;
  std::size_t sampled_membership = 0;  // sum of |W_i| before evenizing
  /// Degree window actually achieved by the D_i.
  std::size_t d_min = 0;
  std::size_t d_max = 0;
  /// Chosen r for conclusion 4 when one exists.
  std::optional<double> r;
  std::vector<std::string> warnings;

  bool all_passed() const;
};

struct PartitionPlan {
  std::size_t K = 0;
  std::size_t parts = 0;  // K^3
  std::vector<std::vector<std::uint32_t>> S;
  std::vector<std::vector<Vertex>> W;
  std::vector<std::vector<Vertex>> U;
  std::vector<std::uint32_t> labels;
  std::vector<Graph> H, F, D, E;
  PartitionReport report;
};

/// Derives U, H, F, D, E from S, W and labels.
PartitionPlan assemble_plan(const Graph& g, std::size_t K, std::vector<std::vector<std::uint32_t>> S,
                            std::vector<std::vector<Vertex>> W, std::vector<std::uint32_t> labels);

/// Evaluates the four conclusions with the given slack s >= 1:
///  1. | |W_i| - n/K^2 | <= s (n/K^2)^{2/3} and |W_i| even;
///  2. min degree of F_i >= (d/n - s tau) |W_i|;
///  3. e_{E_i}(u, W_i) >= |W_i| / (10 K^3 s) for u in U_i;
///  4. some r in [(1 - s tau) d/K^3, d/K^3] with r <= min deg D_i and
///     max deg D_i <= r + s r^{4/5}, over all i.
/// For K = 1 conclusions 2-4 hold vacuously and the plan is marked degenerate.
PartitionReport check_conclusions(const Graph& g, const PartitionPlan& plan, double tau,
                                  double slack);

struct PartitionOptions {
  std::size_t retry_budget = 20;
  double slack = 1.0;
  /// When false the last attempt is returned with its report instead of
  /// raising RetryBudgetExhausted.
  bool enforce = true;
  std::optional<std::size_t> max_parts;
};

/// Sample, evenize, label, check; resample with derived seeds until all
/// conclusions hold.
PartitionPlan build_partition(const Graph& g, std::size_t K, double tau, std::uint64_t seed,
                              const PartitionOptions& options = {});

/// {K, S, labels, report} as JSON text.
std::string plan_to_json(const PartitionPlan& plan);

}  // namespace onefactor
