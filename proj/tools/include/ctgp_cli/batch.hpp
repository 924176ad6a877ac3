#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctgp_cli/config.hpp"

namespace ctgp::cli {

struct PolicyRuns {
  PolicyEntry entry;
  std::string label;              // unique within a batch
  std::vector<RunResult> runs;    // one per seed, in seed order
};

struct BatchResult {
  ExperimentConfig config;
  GridKernelPtr kernel;
  std::vector<Objective> objectives;  // one per seed
  std::vector<PolicyRuns> policies;

  /// Runs whose run-long assertions failed, over all policies.
  [[nodiscard]] std::size_t failed_runs() const;
};

/// Every policy on every seed, fanned out over `workers` threads.
BatchResult execute_batch(const ExperimentConfig& config, std::size_t workers);

/// Median cumulative regret across seeds at round t (1-based).
double median_cum_regret(const PolicyRuns& runs, std::size_t t);

/// Writes traces, objectives, the echoed config and summaries into `dir`.
/// A non-empty `dir` is refused unless `force`, in which case files this
/// tool owns are replaced and anything else is left alone.
void write_batch(const BatchResult& batch, const std::filesystem::path& dir, bool force);

/// Worker count: the explicit flag, else CTGP_WORKERS, else hardware threads.
std::size_t resolve_workers(std::optional<std::size_t> flag);

struct Figure1Metrics {
  double gp_fraction = 0.0;  // median post-exhaustion fraction of rounds at x*
  double a1_fraction = 0.0;
  std::size_t t_two_thirds = 0;
  double ratio_two_thirds = 0.0;  // median R_t(GP-UCB) / median R_t(known C)
  double ratio_final = 0.0;

  [[nodiscard]] bool fraction_ok() const { return a1_fraction > gp_fraction; }
  [[nodiscard]] bool superlinear_ok() const { return ratio_final > ratio_two_thirds; }
};

/// Expects policies gp_ucb and known_c in `batch`.
Figure1Metrics figure1_metrics(const BatchResult& batch);

}  // namespace ctgp::cli
