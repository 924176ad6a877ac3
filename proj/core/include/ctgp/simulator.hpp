#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctgp/adversary.hpp"
#include "ctgp/kernels.hpp"
#include "ctgp/policies.hpp"
#include "ctgp/rng.hpp"

namespace ctgp {

/// f on the grid. Invariants: |f| <= B0 everywhere; f_star = f[x_star_index]
/// is the maximum, lowest index on ties.
struct Objective {
  std::vector<double> values;
  double B = 0.0;   // RKHS norm bound
  double B0 = 0.0;  // range bound
  std::size_t x_star_index = 0;
  double f_star = 0.0;
  // Generating expansion f = sum_j weights[j] k(., grid[centers[j]]); empty
  // for objectives given by explicit values.
  std::vector<std::size_t> centers;
  std::vector<double> weights;

  /// f = sum_j w_j k(., z_j), with B the exact norm of the expansion.
  static Objective from_expansion(const GridKernel& kernel, std::vector<std::size_t> centers,
                                  std::vector<double> weights);
  /// Explicit grid values with a caller-asserted norm bound B.
  static Objective from_values(std::vector<double> values, double B);

  [[nodiscard]] double gap(std::size_t index) const { return f_star - values.at(index); }
};

/// w^T K w of the generating expansion.
double expansion_norm_squared(const GridKernel& kernel, std::span<const std::size_t> centers,
                              std::span<const double> weights);

/// Random expansion over `num_centers` distinct grid points with Gaussian
/// weights, rescaled so its RKHS norm equals B.
Objective sample_rkhs_objective(const GridKernel& kernel, double B, Rng& rng,
                                std::size_t num_centers = 6);

/// Global peak at 0.25 and a lower local peak at 0.75 in the first coordinate.
/// Requires a 1-D grid.
Objective two_peak_objective(const GridKernel& kernel, double local_height = 0.8);

struct RoundRecord {
  std::size_t t = 0;
  Instance instance = Instance::Ucb;
  std::size_t layer = 0;
  std::size_t x_index = 0;
  double y_clean = 0.0;
  double corruption = 0.0;
  double y_tilde = 0.0;
  double instant_regret = 0.0;
  double cum_regret = 0.0;
  double ledger_spent = 0.0;
  bool is_valid = true;
  double mean = 0.0;
  double std = 0.0;
  double beta = 0.0;
};

struct RunDiagnostics {
  std::size_t fast_rounds_checked = 0;
  std::size_t fast_selection_violations = 0;
  std::size_t nesting_violations = 0;
  std::size_t fallback_mutations = 0;
  bool ledger_ok = true;
  std::size_t switch_count = 0;
  std::optional<std::size_t> switch_round;
  bool switch_permanent = true;
  bool primary_covered = true;  // at the start of every round
  std::optional<bool> slow_covered;
  std::size_t fallback_rounds = 0;
  std::size_t all_empty_events = 0;
  double slow_observed_corruption = 0.0;
  double realized_corruption = 0.0;  // sum_t |c_t(x_t)|
  std::optional<std::size_t> exhaustion_round;  // first t with spent == C
  bool attribution_ok = true;
  std::vector<std::size_t> round_counts;
  std::vector<std::string> failures;

  [[nodiscard]] bool passed() const { return failures.empty(); }
};

struct RunSpec {
  GridKernelPtr kernel;
  Objective objective;
  PolicySpec policy;
  AdversarySpec adversary;
  std::optional<double> noise_std;  // default 0.05 B0
  std::uint64_t seed = 1;
  bool track_coverage = true;
};

struct RunResult {
  std::vector<RoundRecord> trace;
  ReportedPoint report{0, 0};
  double simple_regret = 0.0;
  double ledger_spent = 0.0;
  RunDiagnostics diagnostics;

  [[nodiscard]] double cumulative_regret() const { return trace.empty() ? 0.0 : trace.back().cum_regret; }
};

inline constexpr double kDefaultNoiseFraction = 0.05;

double effective_noise_std(const RunSpec& spec);

/// Plays spec.policy.params.horizon rounds. Run-long assertion failures are
/// collected in diagnostics.failures, never thrown.
RunResult run_experiment(const RunSpec& spec);

/// Fraction of rounds after the ledger was exhausted that played x*. Runs
/// whose budget was never exhausted contribute an empty window, scored 0.
double post_exhaustion_optimal_fraction(const RunResult& result, std::size_t x_star_index);

/// Runs jobs [0, count) on up to `workers` threads; results keep job order.
std::vector<RunResult> run_parallel(std::size_t count, std::size_t workers,
                                    const std::function<RunResult(std::size_t)>& job);

}  // namespace ctgp
