#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctgp/adversary.hpp"
#include "ctgp/policies.hpp"
#include "ctgp/simulator.hpp"

namespace ctgp::cli {

struct GridConfig {
  std::vector<double> lower{0.0};
  std::vector<double> upper{1.0};
  std::size_t resolution = 50;

  bool operator==(const GridConfig&) const = default;
};

struct KernelConfig {
  std::string family = "se";  // se | matern | linear
  double lengthscale = 0.1;
  double nu = 2.5;     // matern only
  double scale = 1.0;  // linear only

  bool operator==(const KernelConfig&) const = default;
};

struct ObjectiveConfig {
  std::string type = "rkhs_sample";  // rkhs_sample | two_peak | values
  double B = 1.0;                    // rkhs_sample target norm, or asserted norm for values
  std::size_t num_centers = 6;
  double local_height = 0.85;        // two_peak
  std::vector<double> values;        // values
  std::optional<std::uint64_t> seed; // fixed objective; otherwise drawn per run seed

  bool operator==(const ObjectiveConfig&) const = default;
};

struct PolicyEntry {
  PolicyKind kind = PolicyKind::VanillaUcb;
  std::optional<double> C;

  bool operator==(const PolicyEntry&) const = default;
};

struct ExperimentConfig {
  GridConfig grid;
  KernelConfig kernel;
  ObjectiveConfig objective;
  std::vector<PolicyEntry> policies{PolicyEntry{}};

  // Policy parameters shared by every entry. Unset B, B0 and sigma are taken
  // from the objective and the noise level of each run.
  std::optional<double> B;
  std::optional<double> B0;
  std::optional<double> sigma;
  double lambda = 1.0;
  double delta = 0.1;
  double alpha = 2.0;
  std::size_t horizon = 100;
  GammaMode gamma_mode = GammaMode::Realized;

  std::optional<double> noise_std;  // default 0.05 B0
  AdversarySpec adversary;
  std::vector<std::uint64_t> seeds{1};
  std::string output;  // results directory; may be overridden on the command line

  bool operator==(const ExperimentConfig&) const = default;
};

/// Every violation found, each prefixed with its field path.
struct ConfigErrors {
  std::vector<std::string> messages;
};

/// Parses and validates JSON text. Throws ConfigError whose message joins
/// every violation, one per line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Violations of an in-memory config; empty when valid.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// JSON with every default spelled out.
std::string render_config(const ExperimentConfig& config);

/// "N" expands to 1..N; otherwise a comma-separated list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

GridKernelPtr build_grid_kernel(const ExperimentConfig& config);
Objective build_objective(const ExperimentConfig& config, const GridKernel& kernel, std::uint64_t seed);
RunSpec build_run_spec(const ExperimentConfig& config, const GridKernelPtr& kernel, std::size_t policy_index,
                       std::uint64_t seed);

/// The canned Figure-1 scenario: a two-peak objective whose optimal region
/// is corrupted by -f(x*)/3 up to C = 3.5, played by GP-UCB and known-C UCB.
ExperimentConfig figure1_config();

}  // namespace ctgp::cli
