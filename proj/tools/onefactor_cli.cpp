// Command-line front end. Exit codes: 0 ok, 1 verification failed,
// 2 parse error, 3 precondition, 4 retry budget exhausted, 5 internal error.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/graph.hpp"
#include "onefactor/io.hpp"
#include "onefactor/nibble.hpp"
#include "onefactor/oracle.hpp"
#include "onefactor/pipeline.hpp"

using namespace onefactor;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kParse = 2, kPrecondition = 3, kBudget = 4, kInternal = 5 };

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::SelfLoop:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::VertexOutOfRange:
      return kParse;
    case ErrorCode::RetryBudgetExhausted:
    case ErrorCode::ResampleGoodGraph:
      return kBudget;
    case ErrorCode::InvariantBroken:
      return kInternal;
    default:
      return kPrecondition;
  }
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Counts that fit go out as numbers, larger ones as decimal strings.
json big(const BigInt& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

struct GenerateArgs {
  std::string graph, out, report;
  std::uint64_t seed = 0;
  bool degenerate = false;
  std::size_t K = 2;
  double epsilon = 0.08, p = 0.25, tau_partition = 0.5, tau_nibble = 0.2;
  std::size_t budget = 20;
  std::string completion = "desk";
};

int cmd_generate(const GenerateArgs& a) {
  Graph g = load_edge_list(a.graph);
  RunConfig cfg;
  cfg.seed = a.seed;
  cfg.K = a.degenerate ? 1 : a.K;
  cfg.degenerate_mode = a.degenerate;
  cfg.epsilon = a.epsilon;
  cfg.p = a.degenerate ? 1.0 : a.p;
  cfg.tau_partition = a.tau_partition;
  cfg.tau_nibble = a.tau_nibble;
  cfg.good_budget = cfg.partition_budget = cfg.nibble_budget = cfg.resample_budget = a.budget;
  cfg.completion_mode = a.completion == "strict" ? CompletionMode::Strict : CompletionMode::DeskScale;
  RunReport r = run(g, cfg);
  std::ofstream out(a.out);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + a.out);
  write_factorization(out, g.num_vertices(), r.factorization);
  const std::string text = report_to_json(r, cfg);
  if (a.report.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream(a.report) << text << '\n';
  }
  return r.valid ? kOk : kVerifyFailed;
}

int cmd_verify(const std::string& graph, const std::string& fact) {
  Graph g = load_edge_list(graph);
  auto [n, f] = load_factorization(fact);
  if (n != g.num_vertices()) {
    std::cout << "vertex count mismatch: graph has " << g.num_vertices() << ", factorization " << n
              << '\n';
    return kVerifyFailed;
  }
  VerifyReport rep = verify_factorization(g, f, true);
  if (rep.ok) {
    std::cout << "ok\n";
    return kOk;
  }
  std::cout << to_string(rep.violation) << ": matching " << rep.matching_index << ", edge "
            << rep.edge.u << '-' << rep.edge.v << " (" << rep.message << ")\n";
  return kVerifyFailed;
}

int cmd_count(const std::string& graph, const std::string& mode, std::size_t cap) {
  Graph g = load_edge_list(graph);
  FactorizationCaps caps;
  caps.max_vertices = cap;
  json j;
  j["schema"] = 1;
  j["n"] = g.num_vertices();
  j["pm"] = count_perfect_matchings(g, std::max<std::size_t>(cap, 24));
  if (mode == "unordered" || mode == "both") {
    j["fact_unordered"] = big(count_one_factorizations(g, CountMode::Unordered, caps));
  }
  if (mode == "ordered" || mode == "both") {
    j["fact_ordered"] = big(count_one_factorizations(g, CountMode::Ordered, caps));
  }
  emit(j);
  return kOk;
}

int cmd_bound(double n, double d, std::optional<double> C) {
  json j;
  j["schema"] = 1;
  j["n"] = n;
  j["d"] = d;
  j["C"] = C ? json(*C) : json(nullptr);
  j["log_bound"] = lower_bound_log(n, d, C);
  j["log_simplified"] = lower_bound_log(n, d);
  emit(j);
  return kOk;
}

int cmd_nibble_stats(const std::string& graph, double tau, std::uint64_t seed, const std::string& csv,
                     std::optional<std::size_t> stage_cap, double slack) {
  Graph g = load_edge_list(graph);
  NibbleParams params;
  params.tau = tau;
  params.stage_cap = stage_cap;
  NibbleOutcome o = run_nibble(g, params, seed);
  std::ofstream out(csv);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + csv);
  write_stage_log_csv(out, o);
  const double Delta = static_cast<double>(g.max_degree());
  EquitabilityReport eq = check_equitability(o, tau, Delta, slack);
  json j;
  j["schema"] = 1;
  j["n"] = g.num_vertices();
  j["delta"] = g.min_degree();
  j["tau"] = tau;
  j["t_tau"] = t_tau(tau);
  j["stages"] = o.stage_log.size();
  j["matchings"] = o.matchings.size();
  j["leftover"] = o.leftover.size();
  j["equitability"] = {{"passed", eq.passed},
                       {"slack", slack},
                       {"min_cover", eq.min_cover},
                       {"cover_threshold", eq.cover_threshold},
                       {"max_uncovered", eq.max_uncovered},
                       {"uncovered_threshold", eq.uncovered_threshold}};
  j["csv"] = csv;
  emit(j);
  return kOk;
}

int cmd_random_regular(std::size_t n, std::size_t d, std::uint64_t seed, const std::string& out) {
  Graph g = random_regular(n, d, seed);
  if (out.empty()) {
    write_edge_list(std::cout, g);
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::ParseError, "cannot write " + out);
    write_edge_list(f, g);
  }
  return kOk;
}

int cmd_bench(const std::string& suite) {
  json cases = json::array();
  json perf = json::object();
  auto time_case = [&](const std::string& name, auto&& body) {
    const auto t = Clock::now();
    bool ok = true;
    try {
      ok = body();
    } catch (const Error&) {
      ok = false;
    }
    perf[name] = since(t);
    cases.push_back({{"name", name}, {"ok", ok}});
  };
  time_case("count_K6", [] {
    return count_one_factorizations(complete_graph(6), CountMode::Unordered) == 6;
  });
  time_case("permanent_J12", [] {
    BigInt f = 1;
    for (int i = 2; i <= 12; ++i) f *= i;
    return ryser_permanent(std::vector<std::vector<char>>(12, std::vector<char>(12, 1))) == f;
  });
  time_case("nibble_400_40", [] {
    NibbleParams p;
    p.tau = 0.1;
    return !run_nibble(random_regular(400, 40, 1), p, 1).matchings.empty();
  });
  time_case("pipeline_K8_degenerate", [] {
    RunConfig cfg;
    cfg.K = 1;
    cfg.degenerate_mode = true;
    cfg.p = 1.0;
    return run(complete_graph(8), cfg).valid;
  });
  if (suite == "desk") {
    time_case("pipeline_120_70", [] { return run(random_regular(120, 70, 1), RunConfig{}).valid; });
    time_case("count_K8", [] {
      return count_one_factorizations(complete_graph(8), CountMode::Unordered) == 6240;
    });
  }
  json j;
  j["schema"] = 1;
  j["suite"] = suite;
  j["cases"] = cases;
  j["perf"] = perf;
  emit(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"onefactor: 1-factorizations of dense regular graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "factorize a graph, print the JSON report");
  generate->add_option("graph", gen.graph, "edge-list file")->required();
  generate->add_option("-o,--out", gen.out, "factorization output file")->required();
  generate->add_option("--report", gen.report, "write the JSON report here instead of stdout");
  generate->add_option("--seed", gen.seed);
  generate->add_flag("--degenerate", gen.degenerate, "K = 1, no density check");
  generate->add_option("--K", gen.K)->check(CLI::PositiveNumber);
  generate->add_option("--epsilon", gen.epsilon);
  generate->add_option("--p", gen.p);
  generate->add_option("--tau-partition", gen.tau_partition);
  generate->add_option("--tau-nibble", gen.tau_nibble);
  generate->add_option("--budget", gen.budget, "retry budget for every stage");
  generate->add_option("--completion", gen.completion)->check(CLI::IsMember({"strict", "desk"}));

  std::string v_graph, v_fact;
  auto* verify = app.add_subcommand("verify", "check a factorization against a graph");
  verify->add_option("graph", v_graph)->required();
  verify->add_option("factorization", v_fact)->required();

  std::string c_graph, c_mode = "unordered";
  std::size_t c_cap = 16;
  auto* count = app.add_subcommand("count", "exact perfect matching and 1-factorization counts");
  count->add_option("graph", c_graph)->required();
  count->add_option("--mode", c_mode)->check(CLI::IsMember({"ordered", "unordered", "both"}));
  count->add_option("--cap", c_cap, "vertex cap for factorization counting");

  double b_n = 0, b_d = 0;
  std::optional<double> b_C;
  auto* bound = app.add_subcommand("bound", "log of the lower bound; without --C the simplified form");
  bound->add_option("n", b_n)->required();
  bound->add_option("d", b_d)->required();
  bound->add_option("--C", b_C);

  std::string n_graph, n_csv = "nibble_stages.csv";
  double n_tau = 0.1, n_slack = 5.0;
  std::uint64_t n_seed = 0;
  std::optional<std::size_t> n_cap;
  auto* nibble = app.add_subcommand("nibble-stats", "run the nibble and write the stage log");
  nibble->add_option("graph", n_graph)->required();
  nibble->add_option("--tau", n_tau);
  nibble->add_option("--seed", n_seed);
  nibble->add_option("--csv", n_csv);
  nibble->add_option("--stage-cap", n_cap);
  nibble->add_option("--slack", n_slack);

  std::size_t r_n = 0, r_d = 0;
  std::uint64_t r_seed = 0;
  std::string r_out;
  auto* rr = app.add_subcommand("random-regular", "random d-regular graph as an edge list");
  rr->add_option("n", r_n)->required();
  rr->add_option("d", r_d)->required();
  rr->add_option("--seed", r_seed);
  rr->add_option("-o,--out", r_out);

  std::string suite = "small";
  auto* bench = app.add_subcommand("bench", "time a fixed set of cases");
  bench->add_option("--suite", suite)->check(CLI::IsMember({"small", "desk"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*verify) return cmd_verify(v_graph, v_fact);
    if (*count) return cmd_count(c_graph, c_mode, c_cap);
    if (*bound) return cmd_bound(b_n, b_d, b_C);
    if (*nibble) return cmd_nibble_stats(n_graph, n_tau, n_seed, n_csv, n_cap, n_slack);
    if (*rr) return cmd_random_regular(r_n, r_d, r_seed, r_out);
    if (*bench) return cmd_bench(suite);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e.code());
  }
  return kOk;
}
