#include "onefactor/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/extension.hpp"
#include "onefactor/good_subgraph.hpp"
#include "onefactor/matching.hpp"
#include "onefactor/nibble.hpp"
#include "onefactor/partition.hpp"
#include "onefactor/rng.hpp"

namespace onefactor {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void require(std::vector<std::string>& out, bool ok, const std::string& what) {
  if (!ok) out.push_back(what);
}

// Repeatedly removes the largest Misra-Gries class of the residual graph.
std::vector<Matching> fallback_classes(const Graph& g, std::size_t count) {
  std::vector<Matching> out;
  Graph rest = g;
  while (out.size() < count && rest.num_edges() > 0) {
    auto classes = color_classes(rest, misra_gries_color(rest));
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes.size(); ++c) {
      if (classes[c].size() > classes[best].size()) best = c;
    }
    rest = remove_edges(rest, classes[best].edges);
    out.push_back(std::move(classes[best]));
  }
  return out;
}

struct PartOutcome {
  std::vector<Matching> extended;
  std::size_t nibble_matchings = 0;
  std::size_t nibble_retries = 0;
};

PartOutcome process_part(const PartitionPlan& plan, std::size_t i, const RunConfig& cfg,
                         std::uint64_t seed, StageReport& nibble_stage, StageReport& ext_stage,
                         std::vector<std::string>& fallbacks) {
  PartOutcome po;
  const std::size_t n = plan.H[i].num_vertices();
  InducedSubgraph sub = induced_subgraph(plan.H[i], plan.U[i]);
  if (sub.graph.num_edges() == 0) return po;
  const std::string tag = "part " + std::to_string(i);

  std::vector<Matching> local;
  bool equitable = false;
  const std::size_t Delta = sub.graph.max_degree();
  NibbleParams params;
  params.tau = cfg.tau_nibble;
  params.delta = Delta;
  params.stage_cap = cfg.nibble_stage_cap;
  for (std::size_t a = 0; a < cfg.nibble_budget && !equitable; ++a) {
    NibbleOutcome out = run_nibble(sub.graph, params, derive_seed(seed, a));
    if (check_equitability(out, cfg.tau_nibble, static_cast<double>(Delta), cfg.nibble_slack).passed) {
      equitable = true;
      local = std::move(out.matchings);
      po.nibble_retries = a;
    }
  }
  if (!equitable) {
    po.nibble_retries = cfg.nibble_budget;
    if (!cfg.fallback_matchings) {
      throw Error(ErrorCode::RetryBudgetExhausted, tag + ": no equitable nibble outcome");
    }
    local = fallback_classes(sub.graph, Delta);
    fallbacks.push_back(tag + ": nibble replaced by repeated color-class extraction");
    nibble_stage.violations.push_back(tag + ": equitability failed on every retry");
  }
  nibble_stage.retries += po.nibble_retries;

  ExtensionInstance inst;
  inst.H = plan.H[i];
  inst.U = plan.U[i];
  inst.W = plan.W[i];
  for (const Matching& m : local) {
    if (m.empty()) continue;
    std::vector<Edge> es;
    for (const Edge& e : m.edges) es.emplace_back(sub.original_of[e.u], sub.original_of[e.v]);
    inst.matchings.emplace_back(std::move(es));
  }
  po.nibble_matchings = inst.matchings.size();

  const double nn = static_cast<double>(n);
  const double K = static_cast<double>(plan.K);
  ExtensionThresholds th;
  th.tau = cfg.tau_partition;
  th.min_edges_into_w = static_cast<std::size_t>(std::ceil(nn / std::pow(K, 6)));
  th.max_uncovered = static_cast<std::size_t>(std::floor(nn / std::pow(K, 10)));
  th.max_misses = th.max_uncovered;
  th.max_t = static_cast<std::size_t>(std::floor(10 * nn / std::pow(K, 3)));

  ExtensionResult res = extend_prefix(inst, th);
  const HypothesisReport h = res.hypotheses;
  if (!h.w_degree_ok) ext_stage.violations.push_back(tag + ": min degree in W is " + std::to_string(h.min_w_degree));
  if (!h.w_edges_ok) ext_stage.violations.push_back(tag + ": a U vertex has only " + std::to_string(h.min_edges_into_w) + " edges into W");
  if (!h.coverage_ok) ext_stage.violations.push_back(tag + ": a matching misses " + std::to_string(h.max_uncovered) + " U vertices");
  if (!h.equitability_ok) ext_stage.violations.push_back(tag + ": a U vertex is missed " + std::to_string(h.max_misses) + " times");
  if (!h.count_ok) ext_stage.violations.push_back(tag + ": too many matchings");
  // On a stuck matching, drop it and carry on with the rest against the
  // edges already used.
  std::size_t skipped = 0;
  std::string first_failure;
  for (;;) {
    for (auto& m : res.outputs) {
      inst.used_edges.insert(inst.used_edges.end(), m.edges.begin(), m.edges.end());
      po.extended.push_back(std::move(m));
    }
    if (!res.failure) break;
    if (!cfg.fallback_matchings) throw Error(res.failure->code, tag + ": " + res.failure->diagnostic);
    if (skipped++ == 0) first_failure = res.failure->diagnostic;
    inst.matchings.erase(inst.matchings.begin(),
                         inst.matchings.begin() + static_cast<std::ptrdiff_t>(res.failure->matching_index + 1));
    res = extend_prefix(inst, th);
  }
  if (skipped > 0) {
    fallbacks.push_back(tag + ": skipped " + std::to_string(skipped) + " of " +
                        std::to_string(po.nibble_matchings) + " matchings (first: " + first_failure + ")");
  }
  return po;

}

}  // namespace

std::vector<std::string> constraint_report(std::size_t n, std::size_t d, const RunConfig& cfg) {
  std::vector<std::string> out;
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  const double eps = cfg.epsilon, K = static_cast<double>(cfg.K);
  const double ln_n = std::log(nn);
  const double r1 = dd * cfg.p;
  const double alpha = eps / 10;
  require(out, dd >= nn / 2 + eps * nn, "d >= n/2 + eps n fails: " + num(dd) + " < " + num(nn / 2 + eps * nn));
  require(out, std::pow(eps, 4) > ln_n / nn, "eps^4 >> ln n / n fails: " + num(std::pow(eps, 4)) + " vs " + num(ln_n / nn));
  require(out, std::abs(cfg.p - eps * eps) < 1e-12, "p = eps^2 not used");
  require(out, r1 <= eps * nn / 4, "r1 << eps n fails: r1 ~ " + num(r1) + ", eps n = " + num(eps * nn));
  require(out, r1 >= std::pow(nn, 0.1), "n^{1/10} << r1 fails: r1 ~ " + num(r1));
  require(out, r1 * alpha * alpha >= ln_n, "ln n << r1 alpha^2 fails: " + num(r1 * alpha * alpha) + " < " + num(ln_n));
  require(out, K >= ln_n * ln_n, "K >= ln^2 n fails: K = " + num(K) + ", ln^2 n = " + num(ln_n * ln_n));
  require(out, K >= std::pow(ln_n, 10), "K >= ln^10 n fails: K = " + num(K));
  require(out, K <= std::pow(nn, 1.0 / 300), "K <= n^{1/300} fails: K = " + num(K) + " > " + num(std::pow(nn, 1.0 / 300)));
  require(out, K * K * K <= nn, "K^3 <= n fails: K^3 = " + num(K * K * K));
  require(out, cfg.tau_partition > 0 && cfg.tau_partition < 1, "tau = " + num(cfg.tau_partition) + " is not in (0,1)");
  require(out, cfg.tau_partition > 100 / K, "tau > 100/K fails: tau = " + num(cfg.tau_partition));
  require(out, K > 1, "K = 1: partition and extension steps are vacuous");
  return out;
}

RunConfig asymptotic_defaults(std::size_t n, std::size_t d, std::size_t J) {
  if (n % 2 != 0) throw Error(ErrorCode::OddOrder, std::to_string(n) + " vertices");
  RunConfig cfg;
  cfg.J = J;
  cfg.C = 2000.0 * static_cast<double>(std::max<std::size_t>(J, 10));
  cfg.epsilon = std::pow(static_cast<double>(n), -1.0 / cfg.C);
  cfg.p = cfg.epsilon * cfg.epsilon;
  cfg.K = static_cast<std::size_t>(std::floor(std::pow(cfg.epsilon, -10.0)));
  cfg.tau_partition = 200.0 / static_cast<double>(cfg.K);
  cfg.degenerate_mode = cfg.K == 1;
  cfg.constraint_violations = constraint_report(n, d, cfg);
  return cfg;
}

double lower_bound_log(double n, double d, std::optional<double> C) {
  if (!(n > 1) || !(d > 0) || d > n - 1) {
    throw Error(ErrorCode::DomainError, "need n > 1 and 0 < d <= n - 1");
  }
  double factor = 0;
  if (C) {
    if (!(*C > 0)) throw Error(ErrorCode::DomainError, "C must be positive");
    const double one_minus = -std::expm1(-std::log(n) / *C);
    if (!(one_minus > 0)) throw Error(ErrorCode::DomainError, "1 - n^{-1/C} <= 0");
    factor = std::log(one_minus);
  }
  return d * n / 2 * (std::log(d) - 2 + factor);
}

RunReport run(const Graph& g, const RunConfig& cfg) {
  const auto t_start = Clock::now();
  const std::size_t n = g.num_vertices();
  if (n == 0 || n % 2 != 0) throw Error(ErrorCode::OddOrder, std::to_string(n) + " vertices");
  if (!g.is_regular()) throw Error(ErrorCode::NotRegular, "input graph is not regular");
  const std::size_t d = g.max_degree();
  if (!(cfg.p > 0 && cfg.p <= 1) || !(cfg.epsilon > 0 && cfg.epsilon < 1) || cfg.K == 0 ||
      !(cfg.tau_nibble > 0 && cfg.tau_nibble < 1)) {
    throw Error(ErrorCode::PreconditionViolated, "config out of range");
  }
  if (!cfg.degenerate_mode &&
      static_cast<double>(d) < static_cast<double>(n) / 2 + cfg.epsilon * static_cast<double>(n)) {
    throw Error(ErrorCode::PreconditionViolated,
                "d = " + std::to_string(d) + " is below n/2 + eps n = " +
                    num(static_cast<double>(n) / 2 + cfg.epsilon * static_cast<double>(n)));
  }

  RunReport report;
  report.n = n;
  report.d = d;
  report.constraint_violations = constraint_report(n, d, cfg);
  StageReport good, part, nib, ext, comp;
  good.name = "good_subgraph";
  part.name = "partition";
  nib.name = "nibble";
  ext.name = "extension";
  comp.name = "completion";

  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt >= cfg.resample_budget) {
      throw Error(ErrorCode::RetryBudgetExhausted,
                  "completion failed after " + std::to_string(attempt) + " good-graph draws");
    }
    const std::uint64_t s = derive_seed(cfg.seed, attempt);
    report.fallbacks.clear();
    nib.violations.clear();
    ext.violations.clear();

    auto t0 = Clock::now();
    ExtractOptions eo;
    eo.retry_budget = cfg.good_budget;
    eo.slack = cfg.bipartition_slack;
    eo.clip_to_feasible = cfg.clip_to_feasible;
    eo.skip_density_check = cfg.degenerate_mode;
    GoodGraphCertificate cert = extract_good(g, cfg.epsilon, cfg.p, derive_seed(s, 1), eo);
    good.retries += cert.provenance.attempts > 0 ? cert.provenance.attempts - 1 : 0;
    good.violations = cert.provenance.constraint_notes;
    good.seconds += since(t0);

    t0 = Clock::now();
    const Graph gp = remove_edges(g, cert.host.edges());
    PartitionOptions po;
    po.retry_budget = cfg.partition_budget;
    po.slack = cfg.partition_slack;
    po.enforce = false;
    PartitionPlan plan = build_partition(gp, cfg.K, cfg.tau_partition, derive_seed(s, 2), po);
    part.retries += plan.report.attempts > 0 ? plan.report.attempts - 1 : 0;
    part.violations.clear();
    for (std::size_t c = 0; c < plan.report.conclusions.size(); ++c) {
      if (!plan.report.conclusions[c].passed) {
        part.violations.push_back("conclusion " + std::to_string(c + 1) + ": " +
                                  plan.report.conclusions[c].detail);
      }
    }
    part.seconds += since(t0);

    t0 = Clock::now();
    std::vector<Matching> extended;
    std::size_t nibble_total = 0;
    for (std::size_t i = 0; i < plan.parts; ++i) {
      PartOutcome o = process_part(plan, i, cfg, derive_seed(derive_seed(s, 3), i), nib, ext,
                                   report.fallbacks);
      nibble_total += o.nibble_matchings;
      for (auto& m : o.extended) extended.push_back(std::move(m));
    }
    nib.seconds += since(t0);

    t0 = Clock::now();
    std::vector<Edge> used;
    for (const Matching& m : extended) used.insert(used.end(), m.edges.begin(), m.edges.end());
    const Graph R = remove_edges(gp, used);
    if (!R.is_regular()) throw Error(ErrorCode::InvariantBroken, "leftover graph is not regular");
    const Graph host = edge_union(cert.host, R);
    CompletionOptions co;
    co.mode = cfg.completion_mode;
    co.retry_budget = cfg.completion_budget;
    CompletionResult cr;
    try {
      cr = complete(cert, host, derive_seed(s, 4), co);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ResampleGoodGraph && e.code() != ErrorCode::RetryBudgetExhausted) throw;
      comp.retries += 1;
      comp.violations.push_back(std::string("draw ") + std::to_string(attempt) + ": " + e.what());
      comp.seconds += since(t0);
      ++report.resamples;
      continue;
    }
    for (const auto& note : cr.notes) comp.violations.push_back(note);
    comp.retries += cr.prune_retries;
    if (cr.crossing_fallbacks > 0) {
      report.fallbacks.push_back("completion used crossing edges outside H " +
                                 std::to_string(cr.crossing_fallbacks) + " times");
    }
    comp.seconds += since(t0);

    report.nibble_matchings = nibble_total;
    report.extended_matchings = extended.size();
    report.completion_matchings = cr.factorization.size();
    report.factorization.matchings = std::move(extended);
    for (auto& m : cr.factorization.matchings) report.factorization.matchings.push_back(std::move(m));
    break;
  }

  VerifyReport vr = verify_factorization(g, report.factorization, true);
  if (!vr.ok) throw Error(ErrorCode::InvariantBroken, "pipeline output fails: " + vr.message);
  report.valid = true;
  report.hash = canonical_hash(report.factorization);
  report.stages = {good, part, nib, ext, comp};
  report.seconds = since(t_start);
  return report;
}

DistinctReport generate_distinct(const Graph& g, const RunConfig& cfg, std::size_t num_seeds) {
  DistinctReport out;
  for (std::size_t s = 0; s < num_seeds; ++s) {
    RunConfig c = cfg;
    c.seed = derive_seed(cfg.seed, s);
    ++out.runs;
    try {
      RunReport r = run(g, c);
      ++out.successes;
      if (!out.distinct.emplace(r.hash, canonicalize(std::move(r.factorization))).second) {
        ++out.collisions;
      }
    } catch (const Error& e) {
      ++out.failures;
      ++out.failure_codes[std::string(to_string(e.code()))];
    }
  }
  return out;
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["epsilon"] = cfg.epsilon;
  j["p"] = cfg.p;
  j["K"] = cfg.K;
  j["tau_partition"] = cfg.tau_partition;
  j["tau_nibble"] = cfg.tau_nibble;
  j["C"] = cfg.C;
  j["J"] = cfg.J;
  j["seed"] = cfg.seed;
  j["budgets"] = {{"good", cfg.good_budget},
                  {"partition", cfg.partition_budget},
                  {"nibble", cfg.nibble_budget},
                  {"completion", cfg.completion_budget},
                  {"resample", cfg.resample_budget}};
  j["slack"] = {{"bipartition", cfg.bipartition_slack},
                {"partition", cfg.partition_slack},
                {"nibble", cfg.nibble_slack}};
  j["degenerate_mode"] = cfg.degenerate_mode;
  j["fallback_matchings"] = cfg.fallback_matchings;
  j["clip_to_feasible"] = cfg.clip_to_feasible;
  j["completion_mode"] = cfg.completion_mode == CompletionMode::Strict ? "strict" : "desk";
  return j.dump();
}

std::string report_to_json(const RunReport& report, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["n"] = report.n;
  j["d"] = report.d;
  j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
  j["stages"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json perf;
  for (const auto& st : report.stages) {
    j["stages"].push_back({{"name", st.name}, {"retries", st.retries}, {"violations", st.violations}});
    perf[st.name] = st.seconds;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(report.hash));
  j["hash"] = hex;
  j["valid"] = report.valid;
  j["matchings"] = report.factorization.size();
  j["nibble_matchings"] = report.nibble_matchings;
  j["extended_matchings"] = report.extended_matchings;
  j["completion_matchings"] = report.completion_matchings;
  j["resamples"] = report.resamples;
  j["fallbacks"] = report.fallbacks;
  j["constraint_violations"] = report.constraint_violations;
  perf["total"] = report.seconds;
  j["perf"] = perf;
  return j.dump();
}

}  // namespace onefactor
