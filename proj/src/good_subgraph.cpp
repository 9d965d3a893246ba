#include "onefactor/good_subgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

Graph crossing_graph(const Graph& g, const Bipartition& bip) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (bip.crosses(e)) edges.push_back(e);
  }
  return Graph::from_sorted_unique(g.num_vertices(), std::move(edges));
}

Bipartition random_balanced_bipartition(const Graph& g, std::uint64_t seed,
                                        std::size_t retry_budget, double slack) {
  const std::size_t n = g.num_vertices();
  if (n % 2 != 0) throw Error(ErrorCode::OddOrder, std::to_string(n) + " vertices");
  const double d = static_cast<double>(g.max_degree());
  const double window = slack * 5.0 * std::sqrt(d * std::log(std::max<double>(n, 2)));
  const bool regular = g.is_regular();
  std::vector<Vertex> order(n);
  for (std::size_t attempt = 0; attempt < retry_budget; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    std::iota(order.begin(), order.end(), Vertex{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Vertex> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n / 2));
    std::vector<Vertex> b(order.begin() + static_cast<std::ptrdiff_t>(n / 2), order.end());
    Bipartition bip = Bipartition::from_sides(n, std::move(a), std::move(b));
    if (!regular) continue;
    Graph cross = crossing_graph(g, bip);
    const double lo = static_cast<double>(cross.min_degree());
    const double hi = static_cast<double>(cross.max_degree());
    if (d / 2 - window <= lo && hi <= d / 2 + window) return bip;
  }
  throw Error(ErrorCode::RetryBudgetExhausted,
              std::string("no balanced split within the degree window") +
                  (regular ? "" : " (input graph is not regular)"));
}

namespace {

std::optional<Graph> try_factor(const Graph& g, const Bipartition& bip, std::size_t r) {
  auto res = bipartite_r_factor(g, bip, r);
  if (auto* f = std::get_if<Graph>(&res)) return std::move(*f);
  return std::nullopt;
}

std::vector<std::string> constraint_notes(std::size_t n, std::size_t d, double eps, double p) {
  std::vector<std::string> notes;
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  std::ostringstream out;
  out << "eps^4 / (log n / n) = " << std::pow(eps, 4) / (logn / nn) << " (needs to be large)";
  notes.push_back(out.str());
  out.str("");
  out << "p / (log n / (n eps^3)) = " << p / (logn / (nn * std::pow(eps, 3)))
      << " (needs to be large)";
  notes.push_back(out.str());
  if (static_cast<double>(d) < nn / 2 + eps * nn) {
    notes.push_back("d < n/2 + eps n");
  }
  return notes;
}

}  // namespace

Graph sparsify(const Graph& g, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (coin(rng, p)) kept.push_back(e);
  }
  return Graph::from_sorted_unique(g.num_vertices(), std::move(kept));
}

GoodGraphCertificate extract_good(const Graph& g, double epsilon, double p, std::uint64_t seed,
                                  const ExtractOptions& options) {
  const std::size_t n = g.num_vertices();
  if (n % 2 != 0 || n == 0) {
    throw Error(ErrorCode::PreconditionViolated, "vertex count must be even and positive");
  }
  if (!g.is_regular()) throw Error(ErrorCode::PreconditionViolated, "graph is not regular");
  if (!(epsilon > 0 && epsilon < 1) || !(p > 0 && p <= 1)) {
    throw Error(ErrorCode::PreconditionViolated, "need 0 < eps < 1 and 0 < p <= 1");
  }
  const std::size_t d = g.max_degree();
  const std::size_t m = n / 2;
  if (!options.skip_density_check &&
      static_cast<double>(d) < static_cast<double>(n) / 2 + epsilon * static_cast<double>(n)) {
    throw Error(ErrorCode::PreconditionViolated,
                "d=" + std::to_string(d) + " below n/2 + eps n = " +
                    std::to_string(static_cast<double>(n) / 2 + epsilon * static_cast<double>(n)));
  }
  const double tau = epsilon / 1000.0;
  const double rho_real = static_cast<double>(d) / 2.0 - epsilon * static_cast<double>(m) / 1000.0;
  const auto rho_target = static_cast<std::size_t>(std::max(0.0, std::floor(rho_real)));
  const auto k_target = static_cast<std::size_t>(
      std::ceil((1.0 - tau) * static_cast<double>(rho_target) * p - 1e-12));

  for (std::size_t attempt = 0; attempt < options.retry_budget; ++attempt) {
    const std::uint64_t s = derive_seed(seed, attempt);
    Bipartition bip;
    try {
      bip = random_balanced_bipartition(g, derive_seed(s, 0), options.retry_budget, options.slack);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RetryBudgetExhausted) continue;
      throw;
    }
    Graph cross = crossing_graph(g, bip);

    std::size_t rho = rho_target;
    if (options.clip_to_feasible) rho = std::min(rho, cross.min_degree());
    std::optional<Graph> factor = try_factor(cross, bip, rho);
    while (!factor && options.clip_to_feasible && rho > 1) {
      factor = try_factor(cross, bip, --rho);
    }
    if (!factor || rho == 0) continue;

    Graph sparse = sparsify(*factor, p, derive_seed(s, 1));

    std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - tau) * static_cast<double>(rho) * p - 1e-12));
    if (options.clip_to_feasible) k = std::min(k, sparse.min_degree());
    std::optional<Graph> hfac;
    for (; k >= 1; --k) {
      hfac = try_factor(sparse, bip, k);
      if (hfac || !options.clip_to_feasible) break;
    }
    if (!hfac || k == 0) continue;

    GoodGraphCertificate cert;
    cert.host = std::move(*hfac);
    cert.bip = bip;
    cert.alpha = epsilon / 10.0;
    cert.r1 = k;
    cert.m = m;
    cert.provenance.seed = seed;
    cert.provenance.p = p;
    cert.provenance.epsilon = epsilon;
    cert.provenance.rho_m_target = rho_target;
    cert.provenance.rho_m = rho;
    cert.provenance.k_target = k_target;
    cert.provenance.k = k;
    cert.provenance.clipped = rho != rho_target || k != k_target;
    cert.provenance.attempts = attempt + 1;
    cert.provenance.constraint_notes = constraint_notes(n, d, epsilon, p);
    return cert;
  }
  throw Error(ErrorCode::RetryBudgetExhausted,
              "no good subgraph after " + std::to_string(options.retry_budget) +
                  " attempts (rho_m=" + std::to_string(rho_target) +
                  ", k=" + std::to_string(k_target) + ")");
}

ExpansionReport spot_check_expansion(const Graph& gp, const Bipartition& bip, double c, double p,
                                     std::size_t trials, std::uint64_t seed) {
  ExpansionReport rep;
  const std::size_t m = bip.side_a.size();
  const std::size_t half = m / 2;
  if (half == 0 || trials == 0) {
    rep.passed = rep.max_ratio < c;
    return rep;
  }
  Rng rng(seed);
  std::vector<char> in_y(gp.num_vertices(), 0);
  std::vector<Vertex> x, y;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t s = half - (t % half);
    x.clear();
    y.clear();
    std::sample(bip.side_a.begin(), bip.side_a.end(), std::back_inserter(x), s, rng);
    std::sample(bip.side_b.begin(), bip.side_b.end(), std::back_inserter(y), s, rng);
    for (Vertex v : y) in_y[v] = 1;
    std::size_t e = 0;
    for (Vertex u : x) {
      for (Vertex w : gp.neighbors(u)) e += in_y[w];
    }
    for (Vertex v : y) in_y[v] = 0;
    const double ratio = static_cast<double>(e) / (p * static_cast<double>(m) * static_cast<double>(s));
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_size = s;
    }
    ++rep.trials;
  }
  rep.passed = rep.max_ratio < c;
  return rep;
}

std::variant<Matching, ContractViolation> contract_matching(GoodGraphCertificate& cert,
                                                            const std::vector<Vertex>& removed,
                                                            double min_degree_floor,
                                                            const Graph* host,
                                                            std::vector<std::string>* warnings) {
  const Graph& h = host ? *host : cert.host;
  const std::size_t n = h.num_vertices();
  std::vector<char> gone(n, 0);
  std::size_t removed_a = 0, removed_b = 0;
  for (Vertex v : removed) {
    if (v >= n) throw Error(ErrorCode::UnknownVertex, std::to_string(v));
    if (gone[v]) continue;
    gone[v] = 1;
    (cert.bip.side_of(v) == 0 ? removed_a : removed_b) += 1;
  }
  if (removed_a != removed_b) {
    throw Error(ErrorCode::UnbalancedParts, "removed " + std::to_string(removed_a) + " from A and " +
                                                std::to_string(removed_b) + " from B");
  }
  if (warnings && static_cast<double>(cert.m - removed_a) < (1.0 - cert.alpha) * static_cast<double>(cert.m)) {
    warnings->push_back("remaining side size " + std::to_string(cert.m - removed_a) +
                        " below (1 - alpha) m");
  }
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < n; ++v) {
    if (!gone[v]) keep.push_back(v);
  }
  InducedSubgraph sub = induced_subgraph(h, keep);
  std::vector<Vertex> a, b;
  for (Vertex i = 0; i < keep.size(); ++i) (cert.bip.side_of(keep[i]) == 0 ? a : b).push_back(i);
  Bipartition bip = Bipartition::from_sides(keep.size(), std::move(a), std::move(b));
  if (warnings && !keep.empty() && static_cast<double>(sub.graph.min_degree()) < min_degree_floor) {
    warnings->push_back("remaining min degree " + std::to_string(sub.graph.min_degree()) +
                        " below floor");
  }
  auto res = perfect_bipartite_matching(sub.graph, bip);
  if (auto* mm = std::get_if<Matching>(&res)) {
    std::vector<Edge> edges;
    for (const Edge& e : mm->edges) edges.emplace_back(sub.original_of[e.u], sub.original_of[e.v]);
    return Matching(std::move(edges));
  }
  ++cert.contract_failures;
  ContractViolation cv;
  cv.witness = std::get<HallViolator>(res);
  for (Vertex& v : cv.witness.witness) v = sub.original_of[v];
  for (Vertex& v : cv.witness.neighborhood) v = sub.original_of[v];
  return cv;
}

std::string certificate_to_json(const GoodGraphCertificate& cert) {
  nlohmann::json j;
  j["alpha"] = cert.alpha;
  j["r1"] = cert.r1;
  j["m"] = cert.m;
  j["seed"] = cert.provenance.seed;
  j["p"] = cert.provenance.p;
  j["failures"] = cert.contract_failures;
  j["rho_m"] = cert.provenance.rho_m;
  j["rho_m_target"] = cert.provenance.rho_m_target;
  j["k_target"] = cert.provenance.k_target;
  j["clipped"] = cert.provenance.clipped;
  return j.dump();
}

}  // namespace onefactor
