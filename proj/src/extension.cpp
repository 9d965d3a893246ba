#include "onefactor/extension.hpp"

#include <algorithm>
#include <unordered_set>

#include "onefactor/matching.hpp"

namespace onefactor {

namespace {

using EdgeSet = std::unordered_set<Edge, EdgeHash>;

std::vector<char> membership(const std::vector<Vertex>& vs, std::size_t n) {
  std::vector<char> in(n, 0);
  for (Vertex v : vs) in[v] = 1;
  return in;
}

void validate(const ExtensionInstance& inst, const std::vector<char>& in_u,
              const std::vector<char>& in_w) {
  const std::size_t n = inst.H.num_vertices();
  for (Vertex v : inst.U) {
    if (v >= n) throw Error(ErrorCode::PreconditionViolated, "U vertex out of range");
  }
  for (Vertex v : inst.W) {
    if (v >= n) throw Error(ErrorCode::PreconditionViolated, "W vertex out of range");
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (in_u[v] == in_w[v]) {
      throw Error(ErrorCode::PreconditionViolated,
                  "U and W do not partition V(H) at vertex " + std::to_string(v));
    }
  }
  if (inst.W.size() % 2 != 0) throw Error(ErrorCode::PreconditionViolated, "|W| is odd");
  EdgeSet seen(inst.used_edges.begin(), inst.used_edges.end());
  for (std::size_t i = 0; i < inst.matchings.size(); ++i) {
    const Matching& m = inst.matchings[i];
    if (!is_matching(m.edges, n)) {
      throw Error(ErrorCode::PreconditionViolated, "input " + std::to_string(i) + " is not a matching");
    }
    for (const Edge& e : m.edges) {
      if (!inst.H.has_edge(e) || !in_u[e.u] || !in_u[e.v]) {
        throw Error(ErrorCode::PreconditionViolated,
                    "input " + std::to_string(i) + " has an edge outside H[U]");
      }
      if (!seen.insert(e).second) {
        throw Error(ErrorCode::PreconditionViolated,
                    "input " + std::to_string(i) + " reuses an edge");
      }
    }
  }
}

}  // namespace

HypothesisReport check_hypotheses(const ExtensionInstance& inst, const ExtensionThresholds& th) {
  const std::size_t n = inst.H.num_vertices();
  const auto in_w = membership(inst.W, n);
  const auto in_u = membership(inst.U, n);
  HypothesisReport rep;
  rep.w_even = inst.W.size() % 2 == 0;

  rep.min_w_degree = inst.W.empty() ? 0 : n;
  for (Vertex w : inst.W) {
    std::size_t deg = 0;
    for (Vertex x : inst.H.neighbors(w)) deg += in_w[x];
    rep.min_w_degree = std::min(rep.min_w_degree, deg);
  }
  rep.w_degree_ok = static_cast<double>(rep.min_w_degree) >=
                    (0.5 + th.tau / 2.0) * static_cast<double>(inst.W.size());

  rep.min_edges_into_w = inst.U.empty() ? 0 : n;
  for (Vertex u : inst.U) {
    std::size_t cnt = 0;
    for (Vertex x : inst.H.neighbors(u)) cnt += in_w[x];
    rep.min_edges_into_w = std::min(rep.min_edges_into_w, cnt);
  }
  rep.w_edges_ok = rep.min_edges_into_w >= th.min_edges_into_w;

  std::vector<std::size_t> misses(n, 0);
  for (const Matching& m : inst.matchings) {
    const auto cov = covered_vertices(m, n);
    std::size_t unc = 0;
    for (Vertex u : inst.U) {
      if (!cov[u]) {
        ++unc;
        ++misses[u];
      }
    }
    rep.max_uncovered = std::max(rep.max_uncovered, unc);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (in_u[v]) rep.max_misses = std::max(rep.max_misses, misses[v]);
  }
  rep.coverage_ok = rep.max_uncovered <= th.max_uncovered;
  rep.equitability_ok = rep.max_misses <= th.max_misses;
  rep.count_ok = inst.matchings.size() <= th.max_t;
  return rep;
}

ExtensionResult extend_prefix(const ExtensionInstance& inst, const ExtensionThresholds& th) {
  const Graph& H = inst.H;
  const std::size_t n = H.num_vertices();
  const auto in_u = membership(inst.U, n);
  const auto in_w = membership(inst.W, n);
  validate(inst, in_u, in_w);

  ExtensionResult result;
  result.hypotheses = check_hypotheses(inst, th);
  EdgeSet used(inst.used_edges.begin(), inst.used_edges.end());

  for (std::size_t i = 0; i < inst.matchings.size(); ++i) {
    const Matching& m = inst.matchings[i];
    const auto cov = covered_vertices(m, n);
    std::vector<Edge> out = m.edges;

    std::vector<char> assigned(n, 0);
    bool stuck = false;
    for (Vertex u : inst.U) {
      if (cov[u]) continue;
      bool found = false;
      for (Vertex w : H.neighbors(u)) {
        if (in_w[w] && !assigned[w] && !used.count(Edge(u, w))) {
          assigned[w] = 1;
          out.emplace_back(u, w);
          found = true;
          break;
        }
      }
      if (!found) {
        result.failure = ExtensionFailure{
            ErrorCode::GreedyStuck, i,
            "matching " + std::to_string(i) + ": vertex " + std::to_string(u) +
                " has no unused edge to a free W vertex"};
        stuck = true;
        break;
      }
    }
    if (stuck) break;

    std::vector<Vertex> rest;
    for (Vertex w : inst.W) {
      if (!assigned[w]) rest.push_back(w);
    }
    if (!rest.empty()) {
      std::vector<Edge> sub_edges;
      std::vector<Vertex> local(n, 0);
      for (std::size_t k = 0; k < rest.size(); ++k) local[rest[k]] = static_cast<Vertex>(k);
      const auto in_rest = membership(rest, n);
      for (Vertex a : rest) {
        for (Vertex b : H.neighbors(a)) {
          if (a < b && in_rest[b] && !used.count(Edge(a, b))) sub_edges.emplace_back(local[a], local[b]);
        }
      }
      std::sort(sub_edges.begin(), sub_edges.end());
      Graph sub = Graph::from_sorted_unique(rest.size(), std::move(sub_edges));
      if (2 * sub.min_degree() < rest.size()) {
        result.failure = ExtensionFailure{
            ErrorCode::DiracViolated, i,
            "matching " + std::to_string(i) + ": W remainder of " + std::to_string(rest.size()) +
                " vertices has min degree " + std::to_string(sub.min_degree())};
        break;
      }
      Matching N;
      try {
        N = dirac_perfect_matching(sub);
      } catch (const Error& e) {
        result.failure = ExtensionFailure{e.code(), i, e.what()};
        break;
      }
      for (const Edge& e : N.edges) out.emplace_back(rest[e.u], rest[e.v]);
    }

    Matching full(std::move(out));
    if (2 * full.size() != n || !is_matching(full.edges, n)) {
      throw Error(ErrorCode::InvariantBroken, "extended matching " + std::to_string(i) + " is not perfect");
    }
    for (const Edge& e : full.edges) {
      if (!H.has_edge(e)) throw Error(ErrorCode::InvariantBroken, "extended edge outside H");
      const bool own = std::binary_search(m.edges.begin(), m.edges.end(), e);
      if (!used.insert(e).second && !own) {
        throw Error(ErrorCode::InvariantBroken, "extended matchings share an edge");
      }
    }
    result.outputs.push_back(std::move(full));
  }
  return result;
}

std::vector<Matching> extend_all(const ExtensionInstance& inst, const ExtensionThresholds& th) {
  ExtensionResult r = extend_prefix(inst, th);
  if (r.failure) throw Error(r.failure->code, r.failure->diagnostic);
  return std::move(r.outputs);
}

Matching restrict_to(const Matching& m, const std::vector<Vertex>& U, std::size_t n) {
  const auto in_u = membership(U, n);
  std::vector<Edge> kept;
  for (const Edge& e : m.edges) {
    if (in_u[e.u] && in_u[e.v]) kept.push_back(e);
  }
  return Matching(std::move(kept));
}

bool restriction_law_holds(const std::vector<Matching>& inputs,
                           const std::vector<Matching>& outputs, const std::vector<Vertex>& U,
                           std::size_t n) {
  if (inputs.size() != outputs.size()) return false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (restrict_to(outputs[i], U, n) != inputs[i]) return false;
  }
  return true;
}

bool check_distinctness(const std::vector<Matching>& /*in_a*/,
                        const std::vector<Matching>& /*in_b*/,
                        const std::vector<Matching>& out_a, const std::vector<Matching>& out_b,
                        const std::vector<Vertex>& U, std::size_t n) {
  if (out_a.size() != out_b.size()) return true;
  for (std::size_t i = 0; i < out_a.size(); ++i) {
    if (restrict_to(out_a[i], U, n) != restrict_to(out_b[i], U, n)) return true;
  }
  return out_a != out_b;
}

}  // namespace onefactor
