#include "onefactor/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "onefactor/error.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

namespace {

std::size_t cube(std::size_t K) { return K * K * K; }

std::vector<std::vector<std::uint32_t>> parts_of(std::size_t n,
                                                 const std::vector<std::vector<Vertex>>& W) {
  std::vector<std::vector<std::uint32_t>> out(n);
  for (std::uint32_t i = 0; i < W.size(); ++i) {
    for (Vertex v : W[i]) out[v].push_back(i);
  }
  return out;
}

std::optional<std::uint32_t> first_common(const std::vector<std::uint32_t>& a,
                                          const std::vector<std::uint32_t>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return *ia;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return std::nullopt;
}

std::string fmt_double(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

}  // namespace

bool PartitionReport::all_passed() const {
  return std::all_of(conclusions.begin(), conclusions.end(),
                     [](const ConclusionCheck& c) { return c.passed; });
}

Reservoirs sample_reservoirs(const Graph& g, std::size_t K, std::uint64_t seed,
                             std::optional<std::size_t> max_parts) {
  const std::size_t n = g.num_vertices();
  const std::size_t cap = max_parts.value_or(std::max<std::size_t>(n, 1));
  if (K == 0 || cube(K) > cap) {
    throw Error(ErrorCode::BadK, "K=" + std::to_string(K) + " gives " + std::to_string(cube(K)) +
                                     " parts, cap is " + std::to_string(cap));
  }
  Reservoirs r;
  r.K = K;
  const std::size_t parts = cube(K);
  std::vector<std::uint32_t> pool(parts);
  std::iota(pool.begin(), pool.end(), 0u);
  Rng rng(seed);
  r.S.resize(n);
  r.W.assign(parts, {});
  for (Vertex v = 0; v < n; ++v) {
    r.S[v].reserve(K);
    std::sample(pool.begin(), pool.end(), std::back_inserter(r.S[v]), K, rng);
    for (std::uint32_t i : r.S[v]) r.W[i].push_back(v);
  }
  return r;
}

std::vector<std::vector<Vertex>> evenize(std::vector<std::vector<Vertex>> W, const Graph&) {
  for (auto& w : W) {
    std::sort(w.begin(), w.end());
    if (w.size() % 2 == 1) w.pop_back();
  }
  return W;
}

ReservoirStats compute_stats(const Graph& g, const std::vector<std::vector<std::uint32_t>>&,
                             const std::vector<std::vector<Vertex>>& W) {
  const std::size_t n = g.num_vertices();
  auto parts = parts_of(n, W);
  ReservoirStats st;
  st.Y.assign(n, 0);
  st.Z.assign(W.size(), std::vector<std::size_t>(n, 0));
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex u : g.neighbors(v)) {
      if (!first_common(parts[u], parts[v])) continue;
      ++st.Y[v];
      for (std::uint32_t i : parts[u]) ++st.Z[i][v];
    }
  }
  return st;
}

std::vector<std::uint32_t> assign_labels(const Graph& g, const std::vector<std::vector<Vertex>>& W,
                                         std::size_t parts, std::uint64_t seed) {
  auto member = parts_of(g.num_vertices(), W);
  Rng rng(seed);
  std::uniform_int_distribution<std::uint32_t> draw(0, static_cast<std::uint32_t>(parts - 1));
  std::vector<std::uint32_t> labels;
  labels.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    if (auto i = first_common(member[e.u], member[e.v])) {
      labels.push_back(*i);
    } else {
      labels.push_back(draw(rng));
    }
  }
  return labels;
}

PartitionPlan assemble_plan(const Graph& g, std::size_t K, std::vector<std::vector<std::uint32_t>> S,
                            std::vector<std::vector<Vertex>> W, std::vector<std::uint32_t> labels) {
  const std::size_t n = g.num_vertices();
  PartitionPlan plan;
  plan.K = K;
  plan.parts = W.size();
  std::vector<std::vector<char>> in_w(plan.parts, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < plan.parts; ++i) {
    for (Vertex v : W[i]) in_w[i][v] = 1;
    std::vector<Vertex> u;
    for (Vertex v = 0; v < n; ++v) {
      if (!in_w[i][v]) u.push_back(v);
    }
    plan.U.push_back(std::move(u));
  }
  std::vector<std::vector<Edge>> h(plan.parts), f(plan.parts), d(plan.parts), e(plan.parts);
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    const Edge& ed = g.edges()[k];
    const std::uint32_t i = labels[k];
    h[i].push_back(ed);
    const bool a = in_w[i][ed.u];
    const bool b = in_w[i][ed.v];
    if (a && b) f[i].push_back(ed);
    else if (!a && !b) d[i].push_back(ed);
    else e[i].push_back(ed);
  }
  for (std::size_t i = 0; i < plan.parts; ++i) {
    plan.H.push_back(Graph::from_sorted_unique(n, std::move(h[i])));
    plan.F.push_back(Graph::from_sorted_unique(n, std::move(f[i])));
    plan.D.push_back(Graph::from_sorted_unique(n, std::move(d[i])));
    plan.E.push_back(Graph::from_sorted_unique(n, std::move(e[i])));
  }
  plan.S = std::move(S);
  plan.W = std::move(W);
  plan.labels = std::move(labels);
  return plan;
}

PartitionReport check_conclusions(const Graph& g, const PartitionPlan& plan, double tau,
                                  double slack) {
  PartitionReport rep;
  rep.slack = slack;
  const double n = static_cast<double>(g.num_vertices());
  const double d = static_cast<double>(g.max_degree());
  const double K = static_cast<double>(plan.K);
  const double parts = static_cast<double>(plan.parts);
  rep.degenerate = plan.K == 1;
  if (!g.is_regular()) rep.warnings.push_back("input graph is not regular");
  if (2 * g.min_degree() < g.num_vertices()) rep.warnings.push_back("min degree below n/2");

  // 1. reservoir sizes
  {
    const double target = n / (K * K);
    const double tol = slack * std::pow(target, 2.0 / 3.0);
    auto& c = rep.conclusions[0];
    for (std::size_t i = 0; i < plan.parts; ++i) {
      const double w = static_cast<double>(plan.W[i].size());
      if (plan.W[i].size() % 2 != 0 || std::abs(w - target) > tol) {
        c.passed = false;
        c.detail = "|W_" + std::to_string(i) + "|=" + std::to_string(plan.W[i].size()) +
                   ", target " + fmt_double(target) + " +- " + fmt_double(tol);
        break;
      }
    }
    if (c.passed) c.detail = "all |W_i| within " + fmt_double(target) + " +- " + fmt_double(tol);
  }

  // 2. inner min degree
  {
    auto& c = rep.conclusions[1];
    for (std::size_t i = 0; i < plan.parts && c.passed; ++i) {
      const double need = (d / n - slack * tau) * static_cast<double>(plan.W[i].size());
      for (Vertex v : plan.W[i]) {
        if (static_cast<double>(plan.F[i].degree(v)) < need) {
          c.passed = false;
          c.detail = "deg_F" + std::to_string(i) + "(" + std::to_string(v) +
                     ")=" + std::to_string(plan.F[i].degree(v)) + " < " + fmt_double(need);
          break;
        }
      }
    }
    if (c.passed) c.detail = "ok";
  }

  auto& c3 = rep.conclusions[2];
  auto& c4 = rep.conclusions[3];
  if (rep.degenerate) {
    c3.detail = "vacuous (K=1, U empty)";
    c4.detail = "vacuous (K=1, U empty)";
    return rep;
  }

  // 3. crossing edges into the reservoir
  for (std::size_t i = 0; i < plan.parts && c3.passed; ++i) {
    const double need = static_cast<double>(plan.W[i].size()) / (10.0 * parts * slack);
    for (Vertex u : plan.U[i]) {
      if (static_cast<double>(plan.E[i].degree(u)) < need) {
        c3.passed = false;
        c3.detail = "e_E" + std::to_string(i) + "(" + std::to_string(u) +
                    ", W)=" + std::to_string(plan.E[i].degree(u)) + " < " + fmt_double(need);
        break;
      }
    }
  }
  if (c3.passed) c3.detail = "ok";

  // 4. near-regular outer graphs, one r shared by all i
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (std::size_t i = 0; i < plan.parts; ++i) {
    for (Vertex u : plan.U[i]) {
      lo = std::min(lo, plan.D[i].degree(u));
      hi = std::max(hi, plan.D[i].degree(u));
    }
  }
  if (lo == std::numeric_limits<std::size_t>::max()) lo = 0;
  rep.d_min = lo;
  rep.d_max = hi;
  const double r_hi = d / parts;
  const double r_lo = (1.0 - slack * tau) * d / parts;
  const double r = std::min(static_cast<double>(lo), r_hi);
  if (r < r_lo) {
    c4.passed = false;
    c4.detail = "min deg D = " + std::to_string(lo) + " below " + fmt_double(r_lo);
  } else {
    rep.r = r;
    const double top = r + slack * std::pow(r, 0.8);
    c4.passed = static_cast<double>(hi) <= top;
    c4.detail = "r=" + fmt_double(r) + ", deg D in [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "], allowed max " + fmt_double(top);
  }
  return rep;
}

PartitionPlan build_partition(const Graph& g, std::size_t K, double tau, std::uint64_t seed,
                              const PartitionOptions& options) {
  PartitionPlan last;
  const std::size_t budget = std::max<std::size_t>(options.retry_budget, 1);
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    const std::uint64_t s = derive_seed(seed, attempt);
    Reservoirs res = sample_reservoirs(g, K, derive_seed(s, 1), options.max_parts);
    std::size_t membership = 0;
    for (const auto& w : res.W) membership += w.size();
    auto W = evenize(std::move(res.W), g);
    auto labels = assign_labels(g, W, cube(K), derive_seed(s, 2));
    last = assemble_plan(g, K, std::move(res.S), std::move(W), std::move(labels));
    last.report = check_conclusions(g, last, tau, options.slack);
    last.report.attempts = attempt + 1;
    last.report.sampled_membership = membership;
    if (last.report.all_passed()) return last;
  }
  if (options.enforce) {
    std::string failing;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!last.report.conclusions[i].passed) {
        failing += " conclusion " + std::to_string(i + 1) + ": " + last.report.conclusions[i].detail + ";";
      }
    }
    throw Error(ErrorCode::RetryBudgetExhausted,
                "partition after " + std::to_string(budget) + " attempts;" + failing);
  }
  return last;
}

std::string plan_to_json(const PartitionPlan& plan) {
  nlohmann::json j;
  j["K"] = plan.K;
  j["parts"] = plan.parts;
  j["S"] = plan.S;
  j["labels"] = plan.labels;
  nlohmann::json rep;
  for (const auto& c : plan.report.conclusions) {
    rep["conclusions"].push_back({{"passed", c.passed}, {"detail", c.detail}});
  }
  rep["degenerate"] = plan.report.degenerate;
  rep["slack"] = plan.report.slack;
  rep["attempts"] = plan.report.attempts;
  rep["d_min"] = plan.report.d_min;
  rep["d_max"] = plan.report.d_max;
  rep["r"] = plan.report.r ? nlohmann::json(*plan.report.r) : nlohmann::json(nullptr);
  rep["warnings"] = plan.report.warnings;
  j["report"] = rep;
  return j.dump();
}

}  // namespace onefactor
