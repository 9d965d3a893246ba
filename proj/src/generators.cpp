#include "onefactor/generators.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "onefactor/error.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

namespace {

class DenseAdjacency {
 public:
  explicit DenseAdjacency(std::size_t n) : n_(n), bits_(n * n, 0) {}
  bool get(Vertex a, Vertex b) const { return bits_[a * n_ + b] != 0; }
  void set(Vertex a, Vertex b, bool value) {
    bits_[a * n_ + b] = value;
    bits_[b * n_ + a] = value;
  }

 private:
  std::size_t n_;
  std::vector<char> bits_;
};

struct PairingBuilder {
  std::size_t n;
  DenseAdjacency adj;
  DenseAdjacency blocked;
  std::vector<Edge> edges;
  std::vector<std::size_t> deficit;

  PairingBuilder(std::size_t n_, std::size_t d, const Graph* avoid)
      : n(n_), adj(n_), blocked(n_), deficit(n_, d) {
    if (avoid) {
      for (const Edge& e : avoid->edges()) blocked.set(e.u, e.v, true);
    }
  }

  bool usable(Vertex a, Vertex b) const {
    return a != b && !adj.get(a, b) && !blocked.get(a, b);
  }

  void add(Vertex a, Vertex b) {
    adj.set(a, b, true);
    edges.emplace_back(a, b);
    --deficit[a];
    --deficit[b];
  }

  void pairing_phase(Rng& rng) {
    std::vector<Vertex> points;
    for (Vertex v = 0; v < n; ++v) points.insert(points.end(), deficit[v], v);
    std::size_t failures = 0;
    while (points.size() >= 2 && failures < 20 * points.size() + 100) {
      std::size_t i = uniform_index(rng, points.size());
      std::size_t j = uniform_index(rng, points.size());
      if (i == j || !usable(points[i], points[j])) {
        ++failures;
        continue;
      }
      failures = 0;
      add(points[i], points[j]);
      if (i < j) std::swap(i, j);
      points[i] = points.back();
      points.pop_back();
      points[j] = points.back();
      points.pop_back();
    }
  }

  // Absorbs one unit of deficit at u and at v (u == v means two units at u)
  // by replacing an edge xy with ux and vy.
  bool switch_in(Vertex u, Vertex v, Rng& rng) {
    if (edges.empty()) return false;
    std::size_t start = uniform_index(rng, edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      std::size_t idx = (start + k) % edges.size();
      for (int flip = 0; flip < 2; ++flip) {
        Vertex x = flip ? edges[idx].v : edges[idx].u;
        Vertex y = flip ? edges[idx].u : edges[idx].v;
        if (x == u || x == v || y == u || y == v) continue;
        if (!usable(u, x) || !usable(v, y)) continue;
        adj.set(x, y, false);
        ++deficit[x];
        ++deficit[y];
        edges[idx] = edges.back();
        edges.pop_back();
        add(u, x);
        add(v, y);
        return true;
      }
    }
    return false;
  }

  bool repair_phase(Rng& rng) {
    for (;;) {
      std::optional<Vertex> u;
      for (Vertex a = 0; a < n && !u; ++a) {
        if (deficit[a] > 0) u = a;
      }
      if (!u) return true;
      std::optional<Vertex> partner;
      std::optional<Vertex> blocked_partner;
      for (Vertex b = *u + 1; b < n; ++b) {
        if (deficit[b] == 0) continue;
        if (usable(*u, b)) {
          partner = b;
          break;
        }
        if (!blocked_partner) blocked_partner = b;
      }
      if (partner) {
        add(*u, *partner);
        continue;
      }
      Vertex v = blocked_partner ? *blocked_partner : *u;
      if (v == *u && deficit[*u] < 2) return false;
      if (!switch_in(*u, v, rng)) return false;
    }
  }
};

}  // namespace

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                     std::size_t retry_budget, const Graph* avoid) {
  if ((n * d) % 2 != 0 || (d > 0 && d >= n)) {
    throw Error(ErrorCode::InfeasibleDegree,
                "no " + std::to_string(d) + "-regular graph on " + std::to_string(n) +
                    " vertices");
  }
  if (avoid && avoid->num_vertices() != n) {
    throw Error(ErrorCode::VertexOutOfRange, "avoid graph has a different vertex count");
  }
  for (std::size_t attempt = 0; attempt < retry_budget; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    PairingBuilder builder(n, d, avoid);
    builder.pairing_phase(rng);
    if (!builder.repair_phase(rng)) continue;
    std::sort(builder.edges.begin(), builder.edges.end());
    return Graph::from_sorted_unique(n, std::move(builder.edges));
  }
  throw Error(ErrorCode::RetryBudgetExhausted,
              "random_regular(" + std::to_string(n) + ", " + std::to_string(d) + ") after " +
                  std::to_string(retry_budget) + " attempts");
}

Graph random_regular_bipartite(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (d > m) {
    throw Error(ErrorCode::InfeasibleDegree,
                "degree " + std::to_string(d) + " exceeds part size " + std::to_string(m));
  }
  Rng rng(seed);
  DenseAdjacency adj(2 * m);
  std::vector<std::pair<Vertex, Vertex>> cross;  // (a, b) with b in 0..m-1
  for (Vertex a = 0; a < m; ++a) {
    for (std::size_t j = 0; j < d; ++j) {
      Vertex b = static_cast<Vertex>((a + j) % m);
      cross.emplace_back(a, b);
      adj.set(a, static_cast<Vertex>(m + b), true);
    }
  }
  std::size_t swaps = 10 * cross.size();
  for (std::size_t s = 0; s < swaps && cross.size() >= 2; ++s) {
    std::size_t i = uniform_index(rng, cross.size());
    std::size_t j = uniform_index(rng, cross.size());
    auto [a1, b1] = cross[i];
    auto [a2, b2] = cross[j];
    if (a1 == a2 || b1 == b2) continue;
    if (adj.get(a1, static_cast<Vertex>(m + b2)) || adj.get(a2, static_cast<Vertex>(m + b1))) {
      continue;
    }
    adj.set(a1, static_cast<Vertex>(m + b1), false);
    adj.set(a2, static_cast<Vertex>(m + b2), false);
    adj.set(a1, static_cast<Vertex>(m + b2), true);
    adj.set(a2, static_cast<Vertex>(m + b1), true);
    cross[i].second = b2;
    cross[j].second = b1;
  }
  std::vector<Edge> edges;
  edges.reserve(cross.size());
  for (auto [a, b] : cross) edges.emplace_back(a, static_cast<Vertex>(m + b));
  std::sort(edges.begin(), edges.end());
  return Graph::from_sorted_unique(2 * m, std::move(edges));
}

Graph random_gnp(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (coin(rng, p)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_sorted_unique(n, std::move(edges));
}

Graph random_bipartite(std::size_t a, std::size_t b, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < a; ++u) {
    for (Vertex v = 0; v < b; ++v) {
      if (coin(rng, p)) edges.emplace_back(u, static_cast<Vertex>(a + v));
    }
  }
  return Graph::from_sorted_unique(a + b, std::move(edges));
}

Graph permute_vertices(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vertex> perm(g.num_vertices());
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.emplace_back(perm[e.u], perm[e.v]);
  std::sort(edges.begin(), edges.end());
  return Graph::from_sorted_unique(g.num_vertices(), std::move(edges));
}

}  // namespace onefactor
