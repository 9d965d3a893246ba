#include "onefactor/matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "onefactor/error.hpp"

namespace onefactor {

namespace {

void require_crossing(const Graph& g, const Bipartition& bip) {
  if (bip.num_vertices() != g.num_vertices()) {
    throw Error(ErrorCode::NotBipartite, "bipartition covers " +
                                             std::to_string(bip.num_vertices()) +
                                             " vertices, graph has " +
                                             std::to_string(g.num_vertices()));
  }
  for (const Edge& e : g.edges()) {
    if (!bip.crosses(e)) {
      throw Error(ErrorCode::NotBipartite, "edge (" + std::to_string(e.u) + "," +
                                               std::to_string(e.v) + ") inside one side");
    }
  }
}

void require_balanced(const Bipartition& bip) {
  if (!bip.balanced()) {
    throw Error(ErrorCode::UnbalancedParts, std::to_string(bip.side_a.size()) + " vs " +
                                                std::to_string(bip.side_b.size()));
  }
}

// Side-local view: A vertices 0..na-1, B vertices 0..nb-1, adjacency lists in
// increasing original label order.
struct LocalBipartite {
  std::vector<std::vector<std::uint32_t>> adj;
  std::vector<std::uint32_t> local;
  const Bipartition* bip = nullptr;

  LocalBipartite(const Graph& g, const Bipartition& b) : adj(b.side_a.size()), bip(&b) {
    local.assign(g.num_vertices(), 0);
    for (std::size_t i = 0; i < b.side_a.size(); ++i) local[b.side_a[i]] = i;
    for (std::size_t i = 0; i < b.side_b.size(); ++i) local[b.side_b[i]] = i;
    for (std::size_t i = 0; i < b.side_a.size(); ++i) {
      for (Vertex w : g.neighbors(b.side_a[i])) adj[i].push_back(local[w]);
    }
  }
};

class HopcroftKarp {
 public:
  explicit HopcroftKarp(const LocalBipartite& lb)
      : lb_(lb),
        match_a_(lb.bip->side_a.size(), kNone),
        match_b_(lb.bip->side_b.size(), kNone),
        dist_(lb.bip->side_a.size()) {
    while (bfs()) {
      for (std::size_t a = 0; a < match_a_.size(); ++a) {
        if (match_a_[a] == kNone) dfs(a);
      }
    }
  }

  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  const std::vector<std::uint32_t>& match_a() const { return match_a_; }
  const std::vector<std::uint32_t>& match_b() const { return match_b_; }

 private:
  bool bfs() {
    std::queue<std::uint32_t> q;
    bool reachable_free = false;
    for (std::size_t a = 0; a < match_a_.size(); ++a) {
      if (match_a_[a] == kNone) {
        dist_[a] = 0;
        q.push(a);
      } else {
        dist_[a] = kNone;
      }
    }
    while (!q.empty()) {
      std::uint32_t a = q.front();
      q.pop();
      for (std::uint32_t b : lb_.adj[a]) {
        std::uint32_t next = match_b_[b];
        if (next == kNone) {
          reachable_free = true;
        } else if (dist_[next] == kNone) {
          dist_[next] = dist_[a] + 1;
          q.push(next);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::uint32_t a) {
    for (std::uint32_t b : lb_.adj[a]) {
      std::uint32_t next = match_b_[b];
      if (next == kNone || (dist_[next] == dist_[a] + 1 && dfs(next))) {
        match_a_[a] = b;
        match_b_[b] = a;
        return true;
      }
    }
    dist_[a] = kNone;
    return false;
  }

  const LocalBipartite& lb_;
  std::vector<std::uint32_t> match_a_;
  std::vector<std::uint32_t> match_b_;
  std::vector<std::uint32_t> dist_;
};

Matching to_matching(const LocalBipartite& lb, const HopcroftKarp& hk) {
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < hk.match_a().size(); ++a) {
    if (hk.match_a()[a] != HopcroftKarp::kNone) {
      edges.emplace_back(lb.bip->side_a[a], lb.bip->side_b[hk.match_a()[a]]);
    }
  }
  return Matching(std::move(edges));
}

// Residual graph for Dinic's algorithm.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  int add_edge(std::uint32_t from, std::uint32_t to, std::int64_t cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({from, head_[to], 0});
    head_[to] = static_cast<int>(arcs_.size()) - 1;
    return static_cast<int>(arcs_.size()) - 2;
  }

  std::int64_t max_flow(std::uint32_t s, std::uint32_t t) {
    std::int64_t total = 0;
    while (build_levels(s, t)) {
      it_ = head_;
      while (std::int64_t pushed = push(s, t, std::numeric_limits<std::int64_t>::max())) {
        total += pushed;
      }
    }
    return total;
  }

  std::int64_t flow_on(int arc) const { return arcs_[arc ^ 1].cap; }

  std::vector<char> reachable_from(std::uint32_t s) const {
    std::vector<char> seen(head_.size(), 0);
    std::queue<std::uint32_t> q;
    seen[s] = 1;
    q.push(s);
    while (!q.empty()) {
      std::uint32_t x = q.front();
      q.pop();
      for (int a = head_[x]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = 1;
          q.push(arcs_[a].to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::uint32_t to;
    int next;
    std::int64_t cap;
  };

  bool build_levels(std::uint32_t s, std::uint32_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::uint32_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::uint32_t x = q.front();
      q.pop();
      for (int a = head_[x]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[x] + 1;
          q.push(arcs_[a].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t push(std::uint32_t x, std::uint32_t t, std::int64_t limit) {
    if (x == t) return limit;
    for (int& a = it_[x]; a != -1; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap <= 0 || level_[arc.to] != level_[x] + 1) continue;
      if (std::int64_t got = push(arc.to, t, std::min(limit, arc.cap))) {
        arc.cap -= got;
        arcs_[a ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

class DenseBits {
 public:
  explicit DenseBits(const Graph& g) : n_(g.num_vertices()), bits_(n_ * n_, 0) {
    for (const Edge& e : g.edges()) {
      bits_[e.u * n_ + e.v] = 1;
      bits_[e.v * n_ + e.u] = 1;
    }
  }
  bool operator()(Vertex a, Vertex b) const { return bits_[a * n_ + b] != 0; }

 private:
  std::size_t n_;
  std::vector<char> bits_;
};

}  // namespace

bool check_hall_violator(const Graph& g, const HallViolator& hv) {
  if (hv.witness.empty()) return false;
  std::vector<char> in_n(g.num_vertices(), 0);
  std::size_t size = 0;
  for (Vertex x : hv.witness) {
    for (Vertex w : g.neighbors(x)) {
      if (!in_n[w]) {
        in_n[w] = 1;
        ++size;
      }
    }
  }
  return size < hv.witness.size();
}

Matching max_bipartite_matching(const Graph& g, const Bipartition& bip) {
  require_crossing(g, bip);
  LocalBipartite lb(g, bip);
  HopcroftKarp hk(lb);
  return to_matching(lb, hk);
}

std::variant<Matching, HallViolator> perfect_bipartite_matching(const Graph& g,
                                                               const Bipartition& bip) {
  require_balanced(bip);
  require_crossing(g, bip);
  LocalBipartite lb(g, bip);
  HopcroftKarp hk(lb);
  Matching m = to_matching(lb, hk);
  if (m.size() == bip.side_a.size()) return m;

  // Alternating reachability from the unmatched A vertices: every B vertex
  // reached is matched (no augmenting path), so |N(X)| = |X| - #free.
  const std::size_t na = bip.side_a.size();
  std::vector<char> seen_a(na, 0), seen_b(bip.side_b.size(), 0);
  std::queue<std::uint32_t> q;
  for (std::uint32_t a = 0; a < na; ++a) {
    if (hk.match_a()[a] == HopcroftKarp::kNone) {
      seen_a[a] = 1;
      q.push(a);
    }
  }
  while (!q.empty()) {
    std::uint32_t a = q.front();
    q.pop();
    for (std::uint32_t b : lb.adj[a]) {
      if (seen_b[b]) continue;
      seen_b[b] = 1;
      std::uint32_t next = hk.match_b()[b];
      if (next != HopcroftKarp::kNone && !seen_a[next]) {
        seen_a[next] = 1;
        q.push(next);
      }
    }
  }
  HallViolator hv;
  hv.side = 0;
  for (std::size_t a = 0; a < na; ++a) {
    if (seen_a[a]) hv.witness.push_back(bip.side_a[a]);
  }
  for (std::size_t b = 0; b < seen_b.size(); ++b) {
    if (seen_b[b]) hv.neighborhood.push_back(bip.side_b[b]);
  }
  return hv;
}

std::variant<Graph, FlowCut> bipartite_r_factor(const Graph& g, const Bipartition& bip,
                                                std::size_t r) {
  require_balanced(bip);
  require_crossing(g, bip);
  const std::size_t m = bip.side_a.size();
  LocalBipartite lb(g, bip);
  const std::uint32_t source = 0;
  const auto a_node = [](std::size_t a) { return static_cast<std::uint32_t>(1 + a); };
  const auto b_node = [m](std::size_t b) { return static_cast<std::uint32_t>(1 + m + b); };
  const std::uint32_t sink = static_cast<std::uint32_t>(1 + 2 * m);
  FlowNetwork net(2 * m + 2);
  for (std::size_t a = 0; a < m; ++a) net.add_edge(source, a_node(a), static_cast<std::int64_t>(r));
  std::vector<std::pair<int, Edge>> cross_arcs;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::uint32_t b : lb.adj[a]) {
      int arc = net.add_edge(a_node(a), b_node(b), 1);
      cross_arcs.emplace_back(arc, Edge(bip.side_a[a], bip.side_b[b]));
    }
  }
  for (std::size_t b = 0; b < m; ++b) net.add_edge(b_node(b), sink, static_cast<std::int64_t>(r));

  const auto flow = static_cast<std::size_t>(net.max_flow(source, sink));
  if (flow == r * m) {
    std::vector<Edge> edges;
    for (auto& [arc, e] : cross_arcs) {
      if (net.flow_on(arc) == 1) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    return Graph::from_sorted_unique(g.num_vertices(), std::move(edges));
  }
  FlowCut cut;
  cut.max_flow = flow;
  cut.required = r * m;
  auto seen = net.reachable_from(source);
  for (std::size_t a = 0; a < m; ++a) {
    if (seen[a_node(a)]) cut.source_side_a.push_back(bip.side_a[a]);
  }
  for (std::size_t b = 0; b < m; ++b) {
    if (seen[b_node(b)]) cut.source_side_b.push_back(bip.side_b[b]);
  }
  return cut;
}

namespace {

// Misra-Gries state: at_[v * C + c] is the neighbor joined to v by color c.
class MisraGries {
 public:
  explicit MisraGries(const Graph& g)
      : g_(g),
        colors_(g.max_degree() + 1),
        at_(g.num_vertices() * colors_, kFree),
        offset_(g.num_vertices() + 1, 0),
        in_fan_(g.num_vertices(), 0) {
    for (std::size_t v = 0; v < g.num_vertices(); ++v) offset_[v + 1] = offset_[v] + g.degree(v);
    color_at_.assign(offset_.back(), kFree);
    for (const Edge& e : g.edges()) color_edge(e.u, e.v);
  }

  EdgeColoring result() const {
    EdgeColoring out;
    out.color_of.reserve(g_.num_edges());
    std::size_t used = 0;
    for (const Edge& e : g_.edges()) {
      auto c = static_cast<std::size_t>(color(e.u, e.v));
      out.color_of.push_back(c);
      used = std::max(used, c + 1);
    }
    out.num_colors = used;
    return out;
  }

 private:
  static constexpr int kFree = -1;

  bool is_free(Vertex v, std::size_t c) const { return at_[v * colors_ + c] == kFree; }
  int& at(Vertex v, std::size_t c) { return at_[v * colors_ + c]; }

  std::size_t slot(Vertex a, Vertex b) const {
    const auto& nb = g_.neighbors(a);
    return offset_[a] + static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), b) - nb.begin());
  }
  int color(Vertex a, Vertex b) const { return color_at_[slot(a, b)]; }

  void set(Vertex a, Vertex b, int c) {
    at(a, c) = static_cast<int>(b);
    at(b, c) = static_cast<int>(a);
    color_at_[slot(a, b)] = c;
    color_at_[slot(b, a)] = c;
  }
  void unset(Vertex a, Vertex b) {
    int c = color(a, b);
    if (c == kFree) return;
    at(a, c) = kFree;
    at(b, c) = kFree;
    color_at_[slot(a, b)] = kFree;
    color_at_[slot(b, a)] = kFree;
  }

  std::size_t first_free(Vertex v) const {
    for (std::size_t c = 0; c < colors_; ++c) {
      if (is_free(v, c)) return c;
    }
    throw Error(ErrorCode::ConstructionFailed, "no free color at a vertex");
  }

  void color_edge(Vertex u, Vertex v0) {
    std::vector<Vertex> fan{v0};
    in_fan_[v0] = 1;
    for (bool grew = true; grew;) {
      grew = false;
      Vertex last = fan.back();
      for (std::size_t c = 0; c < colors_; ++c) {
        int w = at_[u * colors_ + c];
        if (is_free(last, c) && w != kFree && !in_fan_[w]) {
          fan.push_back(static_cast<Vertex>(w));
          in_fan_[w] = 1;
          grew = true;
          break;
        }
      }
    }
    for (Vertex x : fan) in_fan_[x] = 0;

    const std::size_t c = first_free(u);
    const std::size_t d = first_free(fan.back());

    // Swap c and d along the alternating path leaving u on color d.
    std::vector<std::tuple<Vertex, Vertex, std::size_t>> path;
    Vertex x = u;
    std::size_t cur = d;
    while (!is_free(x, cur)) {
      Vertex y = static_cast<Vertex>(at(x, cur));
      path.emplace_back(x, y, cur);
      x = y;
      cur = cur == d ? c : d;
    }
    for (auto& [a, b, col] : path) unset(a, b);
    for (auto& [a, b, col] : path) set(a, b, static_cast<int>(col == d ? c : d));

    // First fan vertex with d free whose prefix is still a fan.
    std::size_t w = fan.size();
    for (std::size_t i = 0; i < fan.size(); ++i) {
      if (i > 0) {
        int ci = color(u, fan[i]);
        if (ci == kFree || !is_free(fan[i - 1], static_cast<std::size_t>(ci))) break;
      }
      if (is_free(fan[i], d)) {
        w = i;
        break;
      }
    }
    if (w == fan.size()) throw Error(ErrorCode::ConstructionFailed, "fan rotation point missing");

    for (std::size_t j = 0; j < w; ++j) {
      int next = color(u, fan[j + 1]);
      unset(u, fan[j + 1]);
      set(u, fan[j], next);
    }
    set(u, fan[w], static_cast<int>(d));
  }

  const Graph& g_;
  std::size_t colors_;
  std::vector<int> at_;
  std::vector<std::size_t> offset_;
  std::vector<int> color_at_;
  std::vector<char> in_fan_;
};

}  // namespace

EdgeColoring misra_gries_color(const Graph& g) {
  if (g.num_edges() == 0) return {};
  return MisraGries(g).result();
}

bool is_proper_coloring(const Graph& g, const EdgeColoring& c) {
  if (c.color_of.size() != g.num_edges()) return false;
  std::vector<std::vector<char>> used(g.num_vertices(), std::vector<char>(c.num_colors, 0));
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    std::size_t col = c.color_of[i];
    if (col >= c.num_colors) return false;
    const Edge& e = g.edges()[i];
    if (used[e.u][col] || used[e.v][col]) return false;
    used[e.u][col] = used[e.v][col] = 1;
  }
  return true;
}

std::vector<Matching> color_classes(const Graph& g, const EdgeColoring& c) {
  std::vector<std::vector<Edge>> buckets(c.num_colors);
  for (std::size_t i = 0; i < g.num_edges(); ++i) buckets[c.color_of[i]].push_back(g.edges()[i]);
  std::vector<Matching> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.emplace_back(std::move(b));
  return out;
}

Matching large_matching_via_coloring(const Graph& g, std::size_t k) {
  const std::size_t m = g.num_edges();
  const std::size_t denom = g.max_degree() + 1;
  const std::size_t guaranteed = (m + denom - 1) / denom;
  if (k > guaranteed) {
    throw Error(ErrorCode::RequestTooLarge, "asked for " + std::to_string(k) +
                                                " edges, only " + std::to_string(guaranteed) +
                                                " guaranteed");
  }
  if (k == 0) return {};
  auto classes = color_classes(g, misra_gries_color(g));
  std::size_t best = 0;
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (classes[i].size() > classes[best].size()) best = i;
  }
  std::vector<Edge> edges(classes[best].edges.begin(), classes[best].edges.begin() + k);
  return Matching(std::move(edges));
}

std::vector<Vertex> dirac_hamilton_cycle(const Graph& g) {
  const std::size_t n = g.num_vertices();
  if (n < 3) throw Error(ErrorCode::DiracViolated, "Hamilton cycle needs at least 3 vertices");
  if (2 * g.min_degree() < n) {
    throw Error(ErrorCode::DiracViolated, "min degree " + std::to_string(g.min_degree()) +
                                              " below half of " + std::to_string(n));
  }
  DenseBits adj(g);
  std::vector<Vertex> path{0};
  std::vector<char> on(n, 0);
  on[0] = 1;

  auto extend_back = [&] {
    for (bool grew = true; grew;) {
      grew = false;
      for (Vertex x : g.neighbors(path.back())) {
        if (!on[x]) {
          on[x] = 1;
          path.push_back(x);
          grew = true;
          break;
        }
      }
    }
  };

  // Each round either closes a spanning cycle or opens a strictly longer path.
  for (std::size_t round = 0; round <= n; ++round) {
    extend_back();
    std::reverse(path.begin(), path.end());
    extend_back();

    const std::size_t k = path.size() - 1;
    std::size_t pivot = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (adj(path[0], path[i + 1]) && adj(path[i], path[k])) {
        pivot = i;
        break;
      }
    }
    if (pivot == k) throw Error(ErrorCode::ConstructionFailed, "no closing rotation");
    std::reverse(path.begin() + static_cast<std::ptrdiff_t>(pivot) + 1, path.end());
    if (path.size() == n) return path;

    for (std::size_t j = 0; j < path.size(); ++j) {
      auto it = std::find_if(g.neighbors(path[j]).begin(), g.neighbors(path[j]).end(),
                             [&](Vertex x) { return !on[x]; });
      if (it == g.neighbors(path[j]).end()) continue;
      std::rotate(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(j), path.end());
      path.insert(path.begin(), *it);
      on[*it] = 1;
      break;
    }
  }
  throw Error(ErrorCode::ConstructionFailed, "step budget exhausted");
}

Matching dirac_perfect_matching(const Graph& g) {
  const std::size_t n = g.num_vertices();
  if (n % 2 != 0) throw Error(ErrorCode::OddOrder, std::to_string(n) + " vertices");
  if (n == 0) return {};
  if (n == 2) {
    if (!g.has_edge(0, 1)) throw Error(ErrorCode::DiracViolated, "two isolated vertices");
    return Matching({Edge(0, 1)});
  }
  auto cycle = dirac_hamilton_cycle(g);
  std::vector<Edge> edges;
  edges.reserve(n / 2);
  for (std::size_t i = 0; i < n; i += 2) edges.emplace_back(cycle[i], cycle[i + 1]);
  return Matching(std::move(edges));
}

Factorization bipartite_regular_factorize(const Graph& g, const Bipartition& bip) {
  require_balanced(bip);
  require_crossing(g, bip);
  if (!g.is_regular()) {
    throw Error(ErrorCode::NotRegular, "degrees range over [" + std::to_string(g.min_degree()) +
                                           ", " + std::to_string(g.max_degree()) + "]");
  }
  Factorization f;
  Graph rest = g;
  const std::size_t r = g.num_vertices() == 0 ? 0 : g.max_degree();
  for (std::size_t i = 0; i < r; ++i) {
    auto pm = perfect_bipartite_matching(rest, bip);
    if (!std::holds_alternative<Matching>(pm)) {
      throw Error(ErrorCode::ConstructionFailed, "regular bipartite graph without perfect matching");
    }
    auto& m = std::get<Matching>(pm);
    rest = remove_edges(rest, m.edges);
    f.matchings.push_back(std::move(m));
  }
  return f;
}

}  // namespace onefactor
