#include "onefactor/oracle.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include "onefactor/error.hpp"
#include "onefactor/pipeline.hpp"

namespace onefactor {

namespace {

void check_order(const Graph& g, std::size_t cap) {
  if (g.num_vertices() % 2 != 0) {
    throw Error(ErrorCode::OddOrder, std::to_string(g.num_vertices()) + " vertices");
  }
  if (g.num_vertices() > cap) {
    throw Error(ErrorCode::TooLarge,
                std::to_string(g.num_vertices()) + " vertices exceeds cap " + std::to_string(cap));
  }
}

void enumerate_rec(const Graph& g, std::vector<char>& covered, std::vector<Edge>& cur,
                   std::vector<Matching>& out) {
  Vertex v = 0;
  while (v < g.num_vertices() && covered[v]) ++v;
  if (v == g.num_vertices()) {
    out.emplace_back(cur);
    return;
  }
  covered[v] = 1;
  for (Vertex w : g.neighbors(v)) {
    if (covered[w]) continue;
    covered[w] = 1;
    cur.emplace_back(v, w);
    enumerate_rec(g, covered, cur, out);
    cur.pop_back();
    covered[w] = 0;
  }
  covered[v] = 0;
}

// Edge-mask view of a small graph for the factorization searches.
struct MaskGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  /// inc[v]: (edge index, other endpoint), ordered by neighbor.
  std::vector<std::vector<std::pair<int, Vertex>>> inc;

  explicit MaskGraph(const Graph& g) : n(g.num_vertices()), edges(g.edges()), inc(n) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      inc[edges[i].u].emplace_back(static_cast<int>(i), edges[i].v);
      inc[edges[i].v].emplace_back(static_cast<int>(i), edges[i].u);
    }
    for (auto& l : inc) std::sort(l.begin(), l.end(), [](auto a, auto b) { return a.second < b.second; });
  }

  std::uint64_t full() const {
    return edges.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << edges.size()) - 1;
  }

  /// Perfect matchings within `residual`, as edge masks; when `anchor` >= 0
  /// only those containing it.
  void matchings(std::uint64_t residual, int anchor,
                 const std::function<void(std::uint64_t)>& visit) const {
    std::uint32_t covered = 0;
    std::uint64_t chosen = 0;
    if (anchor >= 0) {
      covered |= (1u << edges[anchor].u) | (1u << edges[anchor].v);
      chosen |= std::uint64_t{1} << anchor;
    }
    rec(residual, covered, chosen, visit);
  }

 private:
  void rec(std::uint64_t residual, std::uint32_t covered, std::uint64_t chosen,
           const std::function<void(std::uint64_t)>& visit) const {
    const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;
    if (covered == all) {
      visit(chosen);
      return;
    }
    const Vertex v = static_cast<Vertex>(std::countr_one(covered));
    for (auto [idx, w] : inc[v]) {
      if (!((residual >> idx) & 1) || ((covered >> w) & 1)) continue;
      rec(residual, covered | (1u << v) | (1u << w), chosen | (std::uint64_t{1} << idx), visit);
    }
  }
};

MaskGraph prepare(const Graph& g, const FactorizationCaps& caps) {
  check_order(g, caps.max_vertices);
  if (!g.is_regular()) throw Error(ErrorCode::NotRegular, "graph is not regular");
  if (g.num_edges() > caps.max_edges || g.num_edges() > 64 || g.num_vertices() > 32) {
    throw Error(ErrorCode::TooLarge, std::to_string(g.num_edges()) + " edges exceeds cap");
  }
  return MaskGraph(g);
}

Matching to_matching(const MaskGraph& mg, std::uint64_t mask) {
  std::vector<Edge> es;
  for (std::uint64_t m = mask; m; m &= m - 1) es.push_back(mg.edges[std::countr_zero(m)]);
  return Matching(std::move(es));
}

std::uint64_t unordered_search(const MaskGraph& mg, std::uint64_t residual,
                               std::vector<std::uint64_t>& stack,
                               const std::function<void(const std::vector<std::uint64_t>&)>* visit) {
  if (residual == 0) {
    if (visit) (*visit)(stack);
    return 1;
  }
  // Lowest vertex with a residual edge; its lowest residual edge anchors the
  // next matching, so every partition is produced once, in increasing order.
  const int anchor = std::countr_zero(residual);
  std::uint64_t total = 0;
  mg.matchings(residual, anchor, [&](std::uint64_t m) {
    if (!stack.empty() && std::countr_zero(stack.back()) >= std::countr_zero(m)) {
      throw Error(ErrorCode::InvariantBroken, "anchors out of order");
    }
    stack.push_back(m);
    total += unordered_search(mg, residual & ~m, stack, visit);
    stack.pop_back();
  });
  return total;
}

using U128 = unsigned __int128;

U128 ordered_search(const MaskGraph& mg, std::uint64_t residual,
                    std::unordered_map<std::uint64_t, U128>& memo) {
  if (residual == 0) return 1;
  if (auto it = memo.find(residual); it != memo.end()) return it->second;
  U128 total = 0;
  mg.matchings(residual, -1, [&](std::uint64_t m) { total += ordered_search(mg, residual & ~m, memo); });
  memo.emplace(residual, total);
  return total;
}

BigInt to_big(U128 x) {
  BigInt r = static_cast<std::uint64_t>(x >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(x);
  return r;
}

}  // namespace

std::vector<Matching> enumerate_perfect_matchings(const Graph& g, std::size_t cap) {
  check_order(g, cap);
  std::vector<Matching> out;
  std::vector<char> covered(g.num_vertices(), 0);
  std::vector<Edge> cur;
  enumerate_rec(g, covered, cur, out);
  return out;
}

std::uint64_t count_perfect_matchings(const Graph& g, std::size_t cap) {
  check_order(g, std::min<std::size_t>(cap, 63));
  const std::size_t n = g.num_vertices();
  std::vector<std::uint64_t> nbr(n, 0);
  for (const Edge& e : g.edges()) {
    nbr[e.u] |= std::uint64_t{1} << e.v;
    nbr[e.v] |= std::uint64_t{1} << e.u;
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::unordered_map<std::uint64_t, std::uint64_t> memo;
  std::function<std::uint64_t(std::uint64_t)> rec = [&](std::uint64_t covered) -> std::uint64_t {
    if (covered == all) return 1;
    if (auto it = memo.find(covered); it != memo.end()) return it->second;
    const int v = std::countr_one(covered);
    std::uint64_t total = 0;
    for (std::uint64_t m = nbr[v] & ~covered; m; m &= m - 1) {
      const int w = std::countr_zero(m);
      total += rec(covered | (std::uint64_t{1} << v) | (std::uint64_t{1} << w));
    }
    memo.emplace(covered, total);
    return total;
  };
  return rec(0);
}

std::vector<std::vector<char>> bipartite_adjacency(const Graph& g, const Bipartition& bip) {
  if (!bip.balanced()) throw Error(ErrorCode::UnbalancedParts, "sides differ in size");
  std::vector<std::vector<char>> a(bip.side_a.size(), std::vector<char>(bip.side_b.size(), 0));
  for (std::size_t i = 0; i < bip.side_a.size(); ++i) {
    for (std::size_t j = 0; j < bip.side_b.size(); ++j) {
      a[i][j] = g.has_edge(bip.side_a[i], bip.side_b[j]) ? 1 : 0;
    }
  }
  return a;
}

BigInt ryser_permanent(const std::vector<std::vector<char>>& a, std::size_t cap) {
  const std::size_t m = a.size();
  for (const auto& row : a) {
    if (row.size() != m) throw Error(ErrorCode::DomainError, "matrix is not square");
  }
  if (m > cap) throw Error(ErrorCode::TooLarge, std::to_string(m) + " rows exceeds cap " + std::to_string(cap));
  if (m == 0) return 1;

  // sum over nonempty column subsets S of (-1)^{|S|} prod_i rowsum_S(i),
  // visiting subsets in Gray-code order; the sign (-1)^m is applied last.
  std::vector<long long> rowsum(m, 0);
  const std::uint64_t limit = std::uint64_t{1} << m;
  auto accumulate = [&](auto zero) {
    using T = decltype(zero);
    T total = 0;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < limit; ++k) {
      const int j = std::countr_zero(k);
      gray ^= std::uint64_t{1} << j;
      const long long delta = ((gray >> j) & 1) ? 1 : -1;
      for (std::size_t i = 0; i < m; ++i) rowsum[i] += delta * a[i][j];
      T prod = 1;
      for (std::size_t i = 0; i < m && prod != 0; ++i) prod *= static_cast<T>(rowsum[i]);
      if (std::popcount(gray) % 2 == 0) total += prod;
      else total -= prod;
    }
    return total;
  };
  BigInt result;
  if (m <= 22) {
    __int128 t = accumulate(__int128{0});
    const bool neg = t < 0;
    U128 mag = neg ? static_cast<U128>(-t) : static_cast<U128>(t);
    result = to_big(mag);
    if (neg) result = -result;
  } else {
    result = accumulate(BigInt{0});
  }
  return m % 2 == 0 ? result : BigInt(-result);
}

BigInt count_one_factorizations(const Graph& g, CountMode mode, const FactorizationCaps& caps) {
  MaskGraph mg = prepare(g, caps);
  if (mode == CountMode::Unordered) {
    std::vector<std::uint64_t> stack;
    return unordered_search(mg, mg.full(), stack, nullptr);
  }
  std::unordered_map<std::uint64_t, U128> memo;
  return to_big(ordered_search(mg, mg.full(), memo));
}

std::uint64_t for_each_factorization(const Graph& g,
                                     const std::function<void(const Factorization&)>& visit,
                                     const FactorizationCaps& caps) {
  MaskGraph mg = prepare(g, caps);
  std::vector<std::uint64_t> stack;
  std::function<void(const std::vector<std::uint64_t>&)> emit =
      [&](const std::vector<std::uint64_t>& masks) {
        Factorization f;
        for (std::uint64_t m : masks) f.matchings.push_back(to_matching(mg, m));
        visit(f);
      };
  return unordered_search(mg, mg.full(), stack, &emit);
}

CountReport count_report(const Graph& g, bool with_witnesses, const FactorizationCaps& caps) {
  CountReport rep;
  rep.perfect_matchings = count_perfect_matchings(g, std::max<std::size_t>(caps.max_vertices, 24));
  if (with_witnesses) {
    std::vector<Factorization> ws;
    rep.factorizations_unordered = for_each_factorization(g, [&](const Factorization& f) { ws.push_back(f); }, caps);
    rep.witnesses = std::move(ws);
  } else {
    rep.factorizations_unordered = count_one_factorizations(g, CountMode::Unordered, caps);
  }
  rep.factorizations_ordered = count_one_factorizations(g, CountMode::Ordered, caps);
  BigInt fact = 1;
  for (std::size_t k = 2; k <= g.max_degree(); ++k) fact *= k;
  if (rep.factorizations_ordered != rep.factorizations_unordered * fact) {
    throw Error(ErrorCode::InvariantBroken, "ordered count differs from unordered times d!");
  }
  return rep;
}

BoundComparison bound_comparison(const Graph& g, std::optional<double> C,
                                 const FactorizationCaps& caps) {
  BoundComparison bc;
  bc.exact = count_one_factorizations(g, CountMode::Unordered, caps);
  const double n = static_cast<double>(g.num_vertices());
  const double d = static_cast<double>(g.max_degree());
  bc.log_exact = bc.exact > 0 ? std::log(bc.exact.convert_to<double>()) : -INFINITY;
  bc.log_simplified = lower_bound_log(n, d);
  bc.log_bound = C ? lower_bound_log(n, d, C) : bc.log_simplified;
  bc.passed = bc.log_exact >= bc.log_bound && bc.log_exact >= bc.log_simplified;
  return bc;
}

}  // namespace onefactor
