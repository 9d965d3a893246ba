#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "onefactor/completion.hpp"
#include "onefactor/graph.hpp"

namespace onefactor {

struct RunConfig {
  double epsilon = 0.08;
  double p = 0.25;
  std::size_t K = 2;
  double tau_partition = 0.5;
  double tau_nibble = 0.2;
  double C = 20000;
  std::size_t J = 1;
  std::uint64_t seed = 0;

  std::size_t good_budget = 20;
  std::size_t partition_budget = 20;
  std::size_t nibble_budget = 20;
  std::size_t completion_budget = 50;
  /// Restarts from the good-graph step.
  std::size_t resample_budget = 20;

  double bipartition_slack = 1.0;
  double partition_slack = 1.0;
  double nibble_slack = 5.0;

  bool degenerate_mode = false;
  bool fallback_matchings = true;
  bool clip_to_feasible = true;
  CompletionMode completion_mode = CompletionMode::DeskScale;
  /// Stage cap for every nibble run; unset runs t_tau stages.
  std::optional<std::size_t> nibble_stage_cap;

  /// Asymptotic requirements that fail at the configured size.
  std::vector<std::string> constraint_violations;
};

/// eps = n^{-1/C} with C = 2000 max(J, 10), p = eps^2, K = floor(eps^-10),
/// tau_partition = 200 / K; lists every coupling that fails at (n, d).
RunConfig asymptotic_defaults(std::size_t n, std::size_t d, std::size_t J = 1);

/// Re-evaluates the asymptotic couplings for an arbitrary config.
std::vector<std::string> constraint_report(std::size_t n, std::size_t d, const RunConfig& cfg);

struct StageReport {
  std::string name;
  std::size_t retries = 0;
  std::vector<std::string> violations;
  double seconds = 0;
};

struct RunReport {
  std::size_t n = 0;
  std::size_t d = 0;
  Factorization factorization;
  std::vector<StageReport> stages;
  std::vector<std::string> constraint_violations;
  /// Places where a fallback replaced the intended construction.
  std::vector<std::string> fallbacks;
  std::size_t resamples = 0;
  std::size_t nibble_matchings = 0;
  std::size_t extended_matchings = 0;
  std::size_t completion_matchings = 0;
  double seconds = 0;
  std::uint64_t hash = 0;
  bool valid = false;
};

/// The five-step construction. Throws PreconditionViolated, NotRegular,
/// OddOrder, RetryBudgetExhausted or InvariantBroken.
RunReport run(const Graph& g, const RunConfig& cfg);

/// Natural log of ((1 - n^{-1/C}) d / e^2)^{dn/2}; with C unset, of
/// (d / e^2)^{dn/2}. Throws DomainError.
double lower_bound_log(double n, double d, std::optional<double> C = std::nullopt);

struct DistinctReport {
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  /// Successful runs whose hash was already present.
  std::size_t collisions = 0;
  std::map<std::uint64_t, Factorization> distinct;
  std::map<std::string, std::size_t> failure_codes;
};

/// Runs with seeds derive_seed(cfg.seed, 0..num_seeds-1), keeps canonical
/// forms keyed by hash. Failed runs are counted, never thrown.
DistinctReport generate_distinct(const Graph& g, const RunConfig& cfg, std::size_t num_seeds);

std::string config_to_json(const RunConfig& cfg);
/// {"schema":1, n, d, config, stages, hash, valid, ..., "perf":{...}}
std::string report_to_json(const RunReport& report, const RunConfig& cfg);

}  // namespace onefactor
