#include "onefactor/nibble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "onefactor/error.hpp"

namespace onefactor {

double p_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::DomainError, "tau must lie in (0,1), got " + std::to_string(tau));
  }
  const double q = tau * (1.0 - tau / 4.0);
  return q * std::exp(-2.0 * q);
}

std::size_t t_tau(double tau) {
  return static_cast<std::size_t>(std::ceil(std::log(4.0 / tau) / p_tau(tau)));
}

NibbleState NibbleState::initial(const Graph& g, std::size_t delta) {
  NibbleState s;
  s.n = g.num_vertices();
  s.delta = delta;
  s.edges = g.edges();
  s.incident.assign(s.n, {});
  for (std::uint32_t i = 0; i < s.edges.size(); ++i) {
    s.incident[s.edges[i].u].push_back(i);
    s.incident[s.edges[i].v].push_back(i);
  }
  s.remaining.assign(s.edges.size(), 1);
  s.color.assign(s.edges.size(), -1);
  Palette full(delta);
  full.set();
  s.edge_palette.assign(s.edges.size(), full);
  s.vertex_palette.assign(s.n, full);
  s.color_deg.assign(s.n * delta, 0);
  for (Vertex v = 0; v < s.n; ++v) {
    std::fill_n(s.color_deg.begin() + static_cast<std::ptrdiff_t>(v * delta), delta,
                static_cast<std::uint32_t>(g.degree(v)));
  }
  return s;
}

std::size_t NibbleState::remaining_count() const {
  return static_cast<std::size_t>(std::count(remaining.begin(), remaining.end(), 1));
}

std::vector<std::uint32_t> NibbleState::recompute_color_deg() const {
  std::vector<std::uint32_t> out(n * delta, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!remaining[i]) continue;
    const Edge& e = edges[i];
    for (auto c = vertex_palette[e.v].find_first(); c != Palette::npos;
         c = vertex_palette[e.v].find_next(c)) {
      ++out[e.u * delta + c];
    }
    for (auto c = vertex_palette[e.u].find_first(); c != Palette::npos;
         c = vertex_palette[e.u].find_next(c)) {
      ++out[e.v * delta + c];
    }
  }
  return out;
}

namespace {

std::size_t nth_set_bit(const Palette& p, std::size_t k) {
  auto c = p.find_first();
  while (k-- > 0) c = p.find_next(c);
  return c;
}

}  // namespace

NibbleState nibble_stage(NibbleState s, const NibbleParams& params, Rng& rng) {
  const std::size_t m = s.edges.size();
  constexpr int kNone = -1;

  // Select nibble: both endpoints flip their own coin for each uncolored edge.
  std::vector<int> tentative(m, kNone);
  std::bernoulli_distribution pick(params.tau / 2.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!s.remaining[i]) continue;
    bool by_u = pick(rng);
    bool by_v = pick(rng);
    if (!(by_u || by_v)) continue;
    const Palette& pal = s.edge_palette[i];
    std::size_t size = pal.count();
    if (size == 0) continue;
    tentative[i] = static_cast<int>(nth_set_bit(pal, uniform_index(rng, size)));
  }

  // A tentative color survives when no edge sharing an endpoint drew it.
  std::vector<std::uint32_t> seen(s.n * s.delta, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (tentative[i] == kNone) continue;
    ++seen[s.edges[i].u * s.delta + tentative[i]];
    ++seen[s.edges[i].v * s.delta + tentative[i]];
  }
  std::vector<std::uint32_t> newly;
  for (std::size_t i = 0; i < m; ++i) {
    if (tentative[i] == kNone) continue;
    const Edge& e = s.edges[i];
    if (seen[e.u * s.delta + tentative[i]] == 1 && seen[e.v * s.delta + tentative[i]] == 1) {
      newly.push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Counters: drop the contributions carried by the edges leaving G_i while
  // the palettes are still those of stage i.
  for (std::uint32_t i : newly) {
    const Edge& e = s.edges[i];
    const Palette& pu = s.vertex_palette[e.u];
    const Palette& pv = s.vertex_palette[e.v];
    for (auto c = pv.find_first(); c != Palette::npos; c = pv.find_next(c)) {
      --s.color_deg[e.u * s.delta + c];
    }
    for (auto c = pu.find_first(); c != Palette::npos; c = pu.find_next(c)) {
      --s.color_deg[e.v * s.delta + c];
    }
    s.remaining[i] = 0;
    s.color[i] = tentative[i];
  }

  std::vector<char> touched(s.n, 0);
  for (std::uint32_t i : newly) {
    const Edge& e = s.edges[i];
    const auto c = static_cast<std::size_t>(s.color[i]);
    for (Vertex w : {e.u, e.v}) {
      s.vertex_palette[w].reset(c);
      touched[w] = 1;
      for (std::uint32_t j : s.incident[w]) {
        if (!s.remaining[j]) continue;
        --s.color_deg[s.edges[j].other(w) * s.delta + c];
      }
    }
  }
  for (Vertex w = 0; w < s.n; ++w) {
    if (!touched[w]) continue;
    for (std::uint32_t j : s.incident[w]) {
      if (!s.remaining[j]) continue;
      const Edge& e = s.edges[j];
      s.edge_palette[j] = s.vertex_palette[e.u] & s.vertex_palette[e.v];
    }
  }
  ++s.stage;
  return s;
}

namespace {

StageLogRow log_row(const NibbleState& s, std::size_t colored, const TrajectoryPoint& pred) {
  StageLogRow row;
  row.stage = s.stage;
  row.edges_colored = colored;
  row.min_vertex_palette = std::numeric_limits<std::size_t>::max();
  row.min_edge_palette = std::numeric_limits<std::size_t>::max();
  for (const auto& p : s.vertex_palette) {
    row.min_vertex_palette = std::min(row.min_vertex_palette, p.count());
    row.max_vertex_palette = std::max(row.max_vertex_palette, p.count());
  }
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    if (!s.remaining[i]) continue;
    row.min_edge_palette = std::min(row.min_edge_palette, s.edge_palette[i].count());
    row.max_edge_palette = std::max(row.max_edge_palette, s.edge_palette[i].count());
  }
  if (row.min_vertex_palette == std::numeric_limits<std::size_t>::max()) row.min_vertex_palette = 0;
  if (row.min_edge_palette == std::numeric_limits<std::size_t>::max()) row.min_edge_palette = 0;
  row.predicted_d = pred.d;
  row.predicted_a = pred.a;
  return row;
}

}  // namespace

NibbleOutcome run_nibble(const Graph& g, const NibbleParams& params, std::uint64_t seed,
                         const std::function<void(const NibbleState&)>& observer) {
  const std::size_t delta = params.delta.value_or(g.min_degree());
  const std::size_t stages = params.stage_cap.value_or(t_tau(params.tau));
  const double Delta = static_cast<double>(std::max<std::size_t>(g.max_degree(), 1));
  auto trajectory = predict_trajectory(Delta, static_cast<double>(g.num_vertices()), params, stages);

  Rng rng(seed);
  NibbleState state = NibbleState::initial(g, delta);
  if (observer) observer(state);
  std::vector<StageLogRow> log;
  std::size_t before = state.remaining_count();
  for (std::size_t i = 0; i < stages; ++i) {
    state = nibble_stage(std::move(state), params, rng);
    std::size_t after = state.remaining_count();
    log.push_back(log_row(state, before - after, trajectory[state.stage]));
    before = after;
    if (observer) observer(state);
  }
  NibbleOutcome out = outcome_from_state(state);
  out.stage_log = std::move(log);
  return out;
}

NibbleOutcome outcome_from_state(const NibbleState& s) {
  NibbleOutcome out;
  out.n = s.n;
  std::vector<std::vector<Edge>> classes(s.delta);
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    if (s.color[i] >= 0) {
      classes[static_cast<std::size_t>(s.color[i])].push_back(s.edges[i]);
    } else {
      out.leftover.push_back(s.edges[i]);
    }
  }
  out.uncovered_count.assign(s.n, s.delta);
  for (auto& cls : classes) {
    for (const Edge& e : cls) {
      --out.uncovered_count[e.u];
      --out.uncovered_count[e.v];
    }
    out.matchings.emplace_back(std::move(cls));
  }
  return out;
}

EquitabilityReport check_equitability(const NibbleOutcome& outcome, double tau, double Delta,
                                      double slack) {
  EquitabilityReport r;
  const double n = static_cast<double>(outcome.n);
  r.cover_threshold = (1.0 - slack * tau) * n;
  r.uncovered_threshold = slack * tau * Delta / 2.0;
  r.min_cover = outcome.n;
  for (std::size_t i = 0; i < outcome.matchings.size(); ++i) {
    std::size_t cover = 2 * outcome.matchings[i].size();
    if (cover < r.min_cover) {
      r.min_cover = cover;
      r.worst_matching = i;
    }
  }
  for (Vertex v = 0; v < outcome.uncovered_count.size(); ++v) {
    if (outcome.uncovered_count[v] > r.max_uncovered) {
      r.max_uncovered = outcome.uncovered_count[v];
      r.worst_vertex = v;
    }
  }
  r.passed = static_cast<double>(r.min_cover) >= r.cover_threshold &&
             static_cast<double>(r.max_uncovered) <= r.uncovered_threshold;
  return r;
}

std::vector<TrajectoryPoint> predict_trajectory_with_rate(double Delta, double n, double rate,
                                                          const NibbleParams& params,
                                                          std::size_t stages) {
  if (!(Delta >= 1.0)) throw Error(ErrorCode::DomainError, "Delta must be at least 1");
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::DomainError, "rate must lie in [0,1)");
  const double delta = params.delta ? static_cast<double>(*params.delta) : Delta;
  const double C = 1.0 + params.big_K * params.tau;
  const double log_n = std::log(std::max(n, 1.0));
  std::vector<TrajectoryPoint> out;
  out.reserve(stages + 1);
  double e = (Delta - delta) / Delta;
  for (std::size_t i = 0; i <= stages; ++i) {
    TrajectoryPoint pt;
    pt.d = std::pow(1.0 - rate, static_cast<double>(i)) * Delta;
    pt.a = pt.d * pt.d / Delta;
    pt.e = e;
    out.push_back(pt);
    e = C * (e + params.little_c * std::sqrt(log_n / pt.a));
  }
  return out;
}

std::vector<TrajectoryPoint> predict_trajectory(double Delta, double n, const NibbleParams& params,
                                                std::size_t stages) {
  return predict_trajectory_with_rate(Delta, n, p_tau(params.tau), params, stages);
}

InvariantReport check_state_invariants(const NibbleState& s, const TrajectoryPoint& predicted,
                                       double tau, double slack) {
  InvariantReport r;
  auto structural = [&](std::string msg) {
    r.structural_ok = false;
    if (r.structural_failures.size() < 16) r.structural_failures.push_back(std::move(msg));
  };

  std::vector<char> used(s.n * s.delta, 0);
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    const Edge& e = s.edges[i];
    if (s.remaining[i]) {
      if (s.color[i] != -1) structural("edge " + std::to_string(i) + " colored and remaining");
      if (s.edge_palette[i] != (s.vertex_palette[e.u] & s.vertex_palette[e.v])) {
        structural("palette intersection law fails on edge " + std::to_string(i));
      }
      continue;
    }
    if (s.color[i] < 0) {
      structural("edge " + std::to_string(i) + " neither colored nor remaining");
      continue;
    }
    const auto c = static_cast<std::size_t>(s.color[i]);
    for (Vertex w : {e.u, e.v}) {
      if (used[w * s.delta + c]) {
        structural("color " + std::to_string(c) + " repeated at vertex " + std::to_string(w));
      }
      used[w * s.delta + c] = 1;
      if (s.vertex_palette[w].test(c)) {
        structural("color " + std::to_string(c) + " used at " + std::to_string(w) +
                   " but still in its palette");
      }
    }
  }
  for (Vertex v = 0; v < s.n; ++v) {
    for (std::size_t c = 0; c < s.delta; ++c) {
      if (!used[v * s.delta + c] && !s.vertex_palette[v].test(c)) {
        structural("color " + std::to_string(c) + " missing from palette of " + std::to_string(v));
      }
    }
  }
  auto fresh = s.recompute_color_deg();
  for (Vertex v = 0; v < s.n && !r.bad_counter; ++v) {
    for (std::size_t c = 0; c < s.delta; ++c) {
      if (fresh[v * s.delta + c] != s.color_deg[v * s.delta + c]) {
        r.bad_counter = std::make_pair(v, c);
        structural("counter deg(" + std::to_string(v) + "," + std::to_string(c) + ") is " +
                   std::to_string(s.color_deg[v * s.delta + c]) + ", recount gives " +
                   std::to_string(fresh[v * s.delta + c]));
        break;
      }
    }
  }

  const double band = slack * tau * tau * tau;
  auto ratio_check = [&](double value, double target, double& worst, const std::string& what) {
    double ratio = target > 0 ? value / target : 1.0;
    if (std::abs(ratio - 1.0) > std::abs(worst - 1.0)) worst = ratio;
    if (std::abs(ratio - 1.0) > band) {
      r.concentration_ok = false;
      if (r.concentration_failures.size() < 16) {
        r.concentration_failures.push_back(what + " ratio " + std::to_string(ratio));
      }
    }
  };
  std::vector<char> active(s.n, 0);
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    if (!s.remaining[i]) continue;
    active[s.edges[i].u] = active[s.edges[i].v] = 1;
    ratio_check(static_cast<double>(s.edge_palette[i].count()), predicted.a, r.worst_edge_ratio,
                "edge palette " + std::to_string(i));
  }
  for (Vertex v = 0; v < s.n; ++v) {
    ratio_check(static_cast<double>(s.vertex_palette[v].count()), predicted.d,
                r.worst_vertex_ratio, "vertex palette " + std::to_string(v));
    if (!active[v]) continue;
    for (std::size_t c = 0; c < s.delta; ++c) {
      if (!s.vertex_palette[v].test(c)) continue;
      ratio_check(static_cast<double>(s.color_deg[v * s.delta + c]), predicted.a,
                  r.worst_deg_ratio,
                  "deg(" + std::to_string(v) + "," + std::to_string(c) + ")");
    }
  }
  return r;
}

std::string serialize(const NibbleOutcome& outcome) {
  std::ostringstream out;
  out << "n " << outcome.n << '\n';
  for (std::size_t c = 0; c < outcome.matchings.size(); ++c) {
    out << "class " << c << ':';
    for (const Edge& e : outcome.matchings[c].edges) out << ' ' << e.u << '-' << e.v;
    out << '\n';
  }
  out << "leftover:";
  for (const Edge& e : outcome.leftover) out << ' ' << e.u << '-' << e.v;
  out << "\nuncovered:";
  for (std::size_t x : outcome.uncovered_count) out << ' ' << x;
  out << '\n';
  return out.str();
}

void write_stage_log_csv(std::ostream& out, const NibbleOutcome& outcome) {
  out << "stage,edges_colored,min_vertex_palette,max_vertex_palette,min_edge_palette,"
         "max_edge_palette,predicted_d_i,predicted_a_i\n";
  for (const auto& row : outcome.stage_log) {
    out << row.stage << ',' << row.edges_colored << ',' << row.min_vertex_palette << ','
        << row.max_vertex_palette << ',' << row.min_edge_palette << ',' << row.max_edge_palette
        << ',' << row.predicted_d << ',' << row.predicted_a << '\n';
  }
}

}  // namespace onefactor
