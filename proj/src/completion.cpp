#include "onefactor/completion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "onefactor/error.hpp"
#include "onefactor/matching.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

namespace {

std::size_t symmetric_f(const Graph& R, const Bipartition& bip) {
  std::size_t fa = 0, fb = 0;
  for (const Edge& e : R.edges()) {
    if (bip.crosses(e)) continue;
    (bip.side_of(e.u) == 0 ? fa : fb) += 1;
  }
  if (fa != fb) {
    throw Error(ErrorCode::InvariantBroken,
                "e(R[A])=" + std::to_string(fa) + " but e(R[B])=" + std::to_string(fb));
  }
  return fa;
}

Graph filter_edges(const Graph& R, const auto& keep) {
  std::vector<Edge> edges;
  for (const Edge& e : R.edges()) {
    if (keep(e)) edges.push_back(e);
  }
  return Graph::from_sorted_unique(R.num_vertices(), std::move(edges));
}

Graph h_view(const Graph& R, const Graph& H) {
  return filter_edges(R, [&](const Edge& e) { return H.has_edge(e); });
}

Graph cross_view(const Graph& R, const Bipartition& bip) {
  return filter_edges(R, [&](const Edge& e) { return bip.crosses(e); });
}

std::vector<Vertex> endpoints(const Matching& a, const Matching& b) {
  std::vector<Vertex> out;
  for (const Matching* m : {&a, &b}) {
    for (const Edge& e : m->edges) {
      out.push_back(e.u);
      out.push_back(e.v);
    }
  }
  return out;
}

// Perfect matching of host minus `removed`, without touching any counters.
std::optional<Matching> plain_matching(const Graph& host, const Bipartition& bip,
                                       const std::vector<Vertex>& removed) {
  std::vector<char> gone(host.num_vertices(), 0);
  for (Vertex v : removed) gone[v] = 1;
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < host.num_vertices(); ++v) {
    if (!gone[v]) keep.push_back(v);
  }
  InducedSubgraph sub = induced_subgraph(host, keep);
  std::vector<Vertex> a, b;
  for (Vertex i = 0; i < keep.size(); ++i) (bip.side_of(keep[i]) == 0 ? a : b).push_back(i);
  if (a.size() != b.size()) return std::nullopt;
  auto res = perfect_bipartite_matching(sub.graph, Bipartition::from_sides(keep.size(), a, b));
  auto* m = std::get_if<Matching>(&res);
  if (!m) return std::nullopt;
  std::vector<Edge> edges;
  for (const Edge& e : m->edges) edges.emplace_back(sub.original_of[e.u], sub.original_of[e.v]);
  return Matching(std::move(edges));
}

Matching merge(const Matching& x, const Matching& y, const Matching& z) {
  std::vector<Edge> edges = x.edges;
  edges.insert(edges.end(), y.edges.begin(), y.edges.end());
  edges.insert(edges.end(), z.edges.begin(), z.edges.end());
  return Matching(std::move(edges));
}

// Attempts M' for the given inner matchings; nullopt when no perfect matching
// exists in any allowed view.
std::optional<Matching> find_peel(CompletionState& state, GoodGraphCertificate& cert,
                                  const Matching& ma, const Matching& mb, bool allow_crossing,
                                  bool& used_crossing) {
  used_crossing = false;
  const auto removed = endpoints(ma, mb);
  Graph hv = h_view(state.R, cert.host);
  const double floor_deg = (1.0 - 2.0 * cert.alpha) * static_cast<double>(cert.r1);
  auto res = contract_matching(cert, removed, floor_deg, &hv);
  if (auto* m = std::get_if<Matching>(&res)) return merge(*m, ma, mb);
  if (!allow_crossing) return std::nullopt;
  if (auto m = plain_matching(cross_view(state.R, cert.bip), cert.bip, removed)) {
    used_crossing = true;
    return merge(*m, ma, mb);
  }
  return std::nullopt;
}

void apply_peel(CompletionState& state, const Bipartition& bip, Matching m0, std::size_t inner,
                std::size_t retries, bool used_crossing) {
  const std::size_t n = state.R.num_vertices();
  if (2 * m0.size() != n || !is_matching(m0.edges, n)) {
    throw Error(ErrorCode::InvariantBroken, "peeled set is not a perfect matching");
  }
  for (const Edge& e : m0.edges) {
    if (!state.R.has_edge(e)) throw Error(ErrorCode::InvariantBroken, "peeled edge outside R_i");
  }
  state.R = remove_edges(state.R, m0.edges);
  state.f = symmetric_f(state.R, bip);
  ++state.symmetry_checks;
  if (used_crossing) ++state.crossing_fallbacks;
  PeelTraceRow row;
  row.iteration = state.peeled.size();
  row.f = state.f;
  row.inner_size = inner;
  row.retries = retries;
  row.used_crossing_fallback = used_crossing;
  row.phase = state.phase;
  state.trace.push_back(row);
  state.peeled.push_back(std::move(m0));
}

Matching random_subset(const Matching& m, std::size_t k, Rng& rng) {
  std::vector<Edge> edges;
  std::sample(m.edges.begin(), m.edges.end(), std::back_inserter(edges), k, rng);
  return Matching(std::move(edges));
}

Matching largest_class(const Graph& side) {
  if (side.num_edges() == 0) return {};
  auto classes = color_classes(side, misra_gries_color(side));
  std::size_t best = 0;
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (classes[i].size() > classes[best].size()) best = i;
  }
  return classes[best];
}

CompletionState desk_peel(CompletionState state, GoodGraphCertificate& cert, std::uint64_t seed,
                          const CompletionOptions& options) {
  auto [ra, rb] = side_graphs(state.R, cert.bip);
  Matching ca = largest_class(ra);
  Matching cb = largest_class(rb);
  std::size_t target = std::min(ca.size(), cb.size());
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < options.retry_budget && target > 0; ++attempt) {
    Matching ma = random_subset(ca, target, rng);
    Matching mb = random_subset(cb, target, rng);
    bool crossing = false;
    if (auto m0 = find_peel(state, cert, ma, mb, true, crossing)) {
      apply_peel(state, cert.bip, std::move(*m0), target, attempt, crossing);
      state.prune_retries += attempt;
      return state;
    }
    if (attempt % 2 == 1) target /= 2;
  }
  if (target == 0) {
    state.phase = CompletionPhase::SingleEdge;
    return state;
  }
  throw Error(ErrorCode::RetryBudgetExhausted, "no peel found for f=" + std::to_string(state.f));
}

}  // namespace

std::pair<Graph, Graph> side_graphs(const Graph& R, const Bipartition& bip) {
  return {filter_edges(R, [&](const Edge& e) { return !bip.crosses(e) && bip.side_of(e.u) == 0; }),
          filter_edges(R, [&](const Edge& e) { return !bip.crosses(e) && bip.side_of(e.u) == 1; })};
}

std::pair<Matching, Matching> inner_matchings(const Graph& R, const Bipartition& bip,
                                              std::size_t r2) {
  auto [ra, rb] = side_graphs(R, bip);
  if (ra.max_degree() > r2 || rb.max_degree() > r2) {
    throw Error(ErrorCode::RequestTooLarge, "side max degree exceeds r2=" + std::to_string(r2));
  }
  const std::size_t f = ra.num_edges();
  if (f != rb.num_edges()) throw Error(ErrorCode::InvariantBroken, "asymmetric sides");
  if (f == 0) return {};
  const std::size_t k = (f + r2) / (r2 + 1);
  return {large_matching_via_coloring(ra, k), large_matching_via_coloring(rb, k)};
}

PruneResult prune_matchings(const Matching& ma, const Matching& mb, const Graph& H, double alpha,
                            std::size_t r1, std::size_t r2, std::size_t f, std::uint64_t seed,
                            std::size_t retry_budget) {
  PruneResult out;
  if (r2 == 0) return out;
  const auto target = static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(f) / (2.0 * static_cast<double>(r2))));
  if (target == 0) return out;
  const double small = 3.0 * alpha * static_cast<double>(r1) / 4.0;
  const double adjacency_cap = 3.0 * alpha * static_cast<double>(r1) / 2.0;
  const bool small_a = static_cast<double>(ma.size()) <= small;
  const bool small_b = static_cast<double>(mb.size()) <= small;
  Rng rng(seed);
  auto subsample = [&](const Matching& m) {
    std::vector<Edge> kept;
    for (const Edge& e : m.edges) {
      if (coin(rng, 3.0 * alpha / 4.0)) kept.push_back(e);
    }
    return Matching(std::move(kept));
  };
  std::vector<std::size_t> load(H.num_vertices());
  for (std::size_t attempt = 0; attempt < retry_budget; ++attempt) {
    Matching ka = small_a ? ma : subsample(ma);
    Matching kb = small_b ? mb : subsample(mb);
    bool ok = ka.size() >= target && kb.size() >= target;
    if (ok) {
      std::fill(load.begin(), load.end(), 0);
      for (Vertex x : endpoints(ka, kb)) {
        for (Vertex v : H.neighbors(x)) ++load[v];
      }
      ok = std::all_of(load.begin(), load.end(),
                       [&](std::size_t l) { return static_cast<double>(l) <= adjacency_cap; });
    }
    if (ok) {
      out.a = Matching(std::vector<Edge>(ka.edges.begin(), ka.edges.begin() + static_cast<std::ptrdiff_t>(target)));
      out.b = Matching(std::vector<Edge>(kb.edges.begin(), kb.edges.begin() + static_cast<std::ptrdiff_t>(target)));
      out.retries = attempt;
      return out;
    }
    if (small_a && small_b) break;
  }
  throw Error(ErrorCode::RetryBudgetExhausted, "pruning found no admissible subsample");
}

CompletionState make_completion_state(const GoodGraphCertificate& cert, const Graph& R) {
  if (R.num_vertices() != cert.host.num_vertices()) {
    throw Error(ErrorCode::PreconditionViolated, "R and H have different vertex sets");
  }
  for (const Edge& e : cert.host.edges()) {
    if (!R.has_edge(e)) throw Error(ErrorCode::PreconditionViolated, "H is not a subgraph of R");
  }
  if (!R.is_regular()) throw Error(ErrorCode::NotRegular, "R is not regular");
  const std::size_t r = R.num_vertices() == 0 ? 0 : R.max_degree();
  if (r < cert.r1) throw Error(ErrorCode::PreconditionViolated, "deg(R) below r1");
  CompletionState st;
  st.R = R;
  st.r2 = r - cert.r1;
  st.f = symmetric_f(R, cert.bip);
  st.phase = st.f == 0 ? CompletionPhase::BipartiteFinish : CompletionPhase::Main;
  return st;
}

CompletionState peel_once(CompletionState state, GoodGraphCertificate& cert, std::uint64_t seed,
                          const CompletionOptions& options) {
  if (state.f == 0) {
    state.phase = CompletionPhase::BipartiteFinish;
    return state;
  }
  if (options.mode == CompletionMode::DeskScale) return desk_peel(std::move(state), cert, seed, options);

  if (state.f <= state.r2) {
    state.phase = CompletionPhase::SingleEdge;
    return state;
  }
  auto [ma, mb] = inner_matchings(state.R, cert.bip, state.r2);
  PruneResult pr = prune_matchings(ma, mb, cert.host, cert.alpha, cert.r1, state.r2, state.f,
                                   derive_seed(seed, 0), options.retry_budget);
  if (pr.a.empty()) {
    state.phase = CompletionPhase::SingleEdge;
    return state;
  }
  bool crossing = false;
  auto m0 = find_peel(state, cert, pr.a, pr.b, false, crossing);
  if (!m0) throw Error(ErrorCode::ResampleGoodGraph, "H view has no perfect matching");
  state.prune_retries += pr.retries;
  apply_peel(state, cert.bip, std::move(*m0), pr.a.size(), pr.retries, false);
  if (state.f <= state.r2) state.phase = CompletionPhase::SingleEdge;
  return state;
}

CompletionState finish_single_edges(CompletionState state, GoodGraphCertificate& cert,
                                    const CompletionOptions& options) {
  state.phase = CompletionPhase::SingleEdge;
  while (state.f > 0) {
    auto [ra, rb] = side_graphs(state.R, cert.bip);
    bool done = false;
    std::size_t tries = 0;
    const std::size_t limit = options.mode == CompletionMode::Strict ? 1 : options.retry_budget;
    for (std::size_t i = 0; i < ra.num_edges() && !done && tries < limit; ++i) {
      for (std::size_t j = 0; j < rb.num_edges() && !done && tries < limit; ++j, ++tries) {
        Matching ma({ra.edges()[i]});
        Matching mb({rb.edges()[j]});
        bool crossing = false;
        auto m0 = find_peel(state, cert, ma, mb, options.mode == CompletionMode::DeskScale, crossing);
        if (m0) {
          apply_peel(state, cert.bip, std::move(*m0), 1, tries, crossing);
          done = true;
        }
      }
    }
    if (!done) {
      if (options.mode == CompletionMode::Strict) {
        throw Error(ErrorCode::ResampleGoodGraph, "single-edge peel has no perfect matching in H");
      }
      throw Error(ErrorCode::RetryBudgetExhausted, "no single-edge peel for f=" + std::to_string(state.f));
    }
  }
  state.phase = CompletionPhase::BipartiteFinish;
  return state;
}

Factorization finish_bipartite(CompletionState state, const Bipartition& bip) {
  Factorization f;
  f.matchings = std::move(state.peeled);
  if (state.R.num_edges() > 0) {
    Factorization rest = bipartite_regular_factorize(state.R, bip);
    for (auto& m : rest.matchings) f.matchings.push_back(std::move(m));
  }
  return f;
}

CompletionResult complete(GoodGraphCertificate& cert, const Graph& R, std::uint64_t seed,
                          const CompletionOptions& options) {
  CompletionState state = make_completion_state(cert, R);
  CompletionResult result;
  const double m = static_cast<double>(std::max<std::size_t>(cert.m, 2));
  result.main_peel_bound =
      cert.alpha > 0 ? std::ceil(3.0 * static_cast<double>(state.r2) * std::log(m) / cert.alpha) + 1 : 0;
  const double window = std::pow(cert.alpha, 4) * static_cast<double>(cert.r1) / std::log(m);
  if (static_cast<double>(state.r2) > window) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "r2=%zu exceeds alpha^4 r1 / ln m = %.3g", state.r2, window);
    result.notes.push_back(buf);
  }

  std::size_t iteration = 0;
  while (state.phase == CompletionPhase::Main) {
    const std::size_t before = state.peeled.size();
    state = peel_once(std::move(state), cert, derive_seed(seed, iteration++), options);
    result.main_peels += state.peeled.size() - before;
  }
  if (state.phase == CompletionPhase::SingleEdge) {
    const std::size_t before = state.peeled.size();
    state = finish_single_edges(std::move(state), cert, options);
    result.single_edge_peels = state.peeled.size() - before;
  }
  result.prune_retries = state.prune_retries;
  result.crossing_fallbacks = state.crossing_fallbacks;
  result.symmetry_checks = state.symmetry_checks;
  result.trace = state.trace;
  const std::size_t peeled = state.peeled.size();
  result.factorization = finish_bipartite(std::move(state), cert.bip);
  result.bipartite_matchings = result.factorization.size() - peeled;

  VerifyReport rep = verify_factorization(R, result.factorization, true);
  if (!rep.ok) throw Error(ErrorCode::InvariantBroken, "completion output fails: " + rep.message);
  return result;
}

void write_peel_trace_csv(std::ostream& out, const std::vector<PeelTraceRow>& trace) {
  out << "iteration,f_i,inner_size,retries,crossing_fallback,phase\n";
  for (const auto& row : trace) {
    out << row.iteration << ',' << row.f << ',' << row.inner_size << ',' << row.retries << ','
        << (row.used_crossing_fallback ? 1 : 0) << ','
        << (row.phase == CompletionPhase::Main ? "main" : "single-edge") << '\n';
  }
}

}  // namespace onefactor
