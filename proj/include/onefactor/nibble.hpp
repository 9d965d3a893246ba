#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "onefactor/graph.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

struct NibbleParams {
  double tau = 0.1;
  /// Number of colors; unset means the minimum degree of the input.
  std::optional<std::size_t> delta;
  std::optional<std::size_t> stage_cap;
  double slack = 1.0;
  double big_K = 1.0;
  double little_c = 1.0;
};

/// p_tau = tau (1 - tau/4) exp(-2 tau (1 - tau/4)). Throws DomainError
/// outside 0 < tau < 1.
double p_tau(double tau);
/// ceil(ln(4/tau) / p_tau).
std::size_t t_tau(double tau);

using Palette = boost::dynamic_bitset<>;

/// Snapshot of the coloring process after `stage` stages. Colors are
/// 0..delta-1 and edges are indexed as in the input graph.
struct NibbleState {
  std::size_t n = 0;
  std::size_t delta = 0;
  std::size_t stage = 0;
  std::vector<Edge> edges;
  /// incident[v] lists the indices of all input edges at v.
  std::vector<std::vector<std::uint32_t>> incident;
  std::vector<char> remaining;
  /// Final color per edge, -1 while uncolored.
  std::vector<int> color;
  std::vector<Palette> edge_palette;
  std::vector<Palette> vertex_palette;
  /// color_deg[v * delta + c]: remaining neighbors of v whose palette has c.
  std::vector<std::uint32_t> color_deg;

  static NibbleState initial(const Graph& g, std::size_t delta);

  std::uint32_t deg(Vertex v, std::size_t c) const { return color_deg[v * delta + c]; }
  std::size_t remaining_count() const;
  /// Counters recomputed from the definition.
  std::vector<std::uint32_t> recompute_color_deg() const;
};

struct StageLogRow {
  std::size_t stage = 0;
  std::size_t edges_colored = 0;
  std::size_t min_vertex_palette = 0;
  std::size_t max_vertex_palette = 0;
  std::size_t min_edge_palette = 0;
  std::size_t max_edge_palette = 0;
  double predicted_d = 0;
  double predicted_a = 0;
};

struct NibbleOutcome {
  std::size_t n = 0;
  std::vector<Matching> matchings;
  std::vector<Edge> leftover;
  /// delta minus the number of color classes covering v.
  std::vector<std::size_t> uncovered_count;
  std::vector<StageLogRow> stage_log;
};

/// One stage of the randomized coloring, returning the next state.
NibbleState nibble_stage(NibbleState state, const NibbleParams& params, Rng& rng);

/// Runs t_tau stages (or stage_cap). `observer` sees the initial state and
/// the state after every stage.
NibbleOutcome run_nibble(const Graph& g, const NibbleParams& params, std::uint64_t seed,
                         const std::function<void(const NibbleState&)>& observer = {});

NibbleOutcome outcome_from_state(const NibbleState& state);

struct EquitabilityReport {
  bool passed = true;
  std::size_t min_cover = 0;
  std::size_t worst_matching = 0;
  std::size_t max_uncovered = 0;
  Vertex worst_vertex = 0;
  double cover_threshold = 0;
  double uncovered_threshold = 0;
};

/// Every class covers at least (1 - slack tau) n vertices and every vertex
/// misses at most slack tau Delta / 2 classes.
EquitabilityReport check_equitability(const NibbleOutcome& outcome, double tau, double Delta,
                                      double slack);

struct TrajectoryPoint {
  double d = 0;
  double a = 0;
  double e = 0;
};

/// d_i = (1 - p)^i Delta, a_i = d_i^2 / Delta, e_{i+1} = C (e_i + c sqrt(ln n / a_i))
/// with C = 1 + K tau and e_0 = (Delta - delta) / Delta; points 0..stages.
std::vector<TrajectoryPoint> predict_trajectory(double Delta, double n, const NibbleParams& params,
                                                std::size_t stages);
/// Same recurrence with an explicit per-stage rate in place of p_tau.
std::vector<TrajectoryPoint> predict_trajectory_with_rate(double Delta, double n, double rate,
                                                          const NibbleParams& params,
                                                          std::size_t stages);

struct InvariantReport {
  bool structural_ok = true;
  bool concentration_ok = true;
  std::vector<std::string> structural_failures;
  std::vector<std::string> concentration_failures;
  /// Located counter mismatch, if any.
  std::optional<std::pair<Vertex, std::size_t>> bad_counter;
  double worst_vertex_ratio = 1.0;
  double worst_edge_ratio = 1.0;
  double worst_deg_ratio = 1.0;
};

/// Exact structural checks plus concentration of palette sizes and counters
/// around the predicted trajectory within (1 +- slack tau^3).
InvariantReport check_state_invariants(const NibbleState& state, const TrajectoryPoint& predicted,
                                       double tau, double slack);

/// Canonical text of an outcome (classes, leftover, coverage).
std::string serialize(const NibbleOutcome& outcome);
void write_stage_log_csv(std::ostream& out, const NibbleOutcome& outcome);

}  // namespace onefactor
