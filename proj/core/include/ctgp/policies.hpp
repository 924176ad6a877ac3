#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctgp/confidence.hpp"
#include "ctgp/posterior.hpp"
#include "ctgp/rng.hpp"

namespace ctgp {

enum class PolicyKind { VanillaUcb, KnownC, FastSlow, LayeredUnknownC };

std::string_view policy_label(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view label);

/// How gamma_{t-1} inside every beta schedule is instantiated.
enum class GammaMode {
  Realized,    // information gain of the instance's own history
  AnalyticSE,  // (ln(1 + t))^(d + 1), the squared-exponential growth rate
};

struct PolicyParams {
  BetaParams beta;
  double alpha = 2.0;
  std::optional<double> C;  // known corruption level; forbidden for the layered policy
  std::size_t horizon = 1;
  GammaMode gamma_mode = GammaMode::Realized;

  bool operator==(const PolicyParams&) const = default;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::VanillaUcb;
  PolicyParams params;

  bool operator==(const PolicySpec&) const = default;
};

/// Throws ConfigError on out-of-range parameters or a C that is missing
/// (known-C policies) or present (layered policy).
void validate(const PolicySpec& spec);

enum class Instance { Ucb, KnownC, Fast, Slow, Pooled, Layer };

std::string instance_label(Instance instance, std::size_t layer = 0);

/// One branch of the player's selection distribution Phi_t.
struct PlanEntry {
  Instance instance = Instance::Ucb;
  std::size_t layer = 0;         // sampled layer (layered policy only)
  std::size_t acting_layer = 0;  // layer whose bounds choose the point
  double probability = 1.0;
  std::size_t index = 0;         // grid point this branch plays
  bool fallback = false;         // sampled layer had an empty maximizer set
  bool all_sets_empty = false;
};

/// Phi_t as published to the adversary before the draw: the branch
/// probabilities and the deterministic point each branch plays.
struct SelectionPlan {
  std::vector<PlanEntry> entries;

  /// Phi_t({x_index}).
  [[nodiscard]] double probability_of(std::size_t grid_index) const;
};

struct StepOutcome {
  std::size_t index = 0;
  Instance instance = Instance::Ucb;
  std::size_t layer = 0;
  // Moments of the acting instance at x_t before the observation, and beta_t.
  double mean = 0.0;
  double std = 0.0;
  double beta = 0.0;
  bool is_valid = true;
  bool switched = false;
  bool fallback = false;
  bool all_sets_empty = false;
  std::optional<bool> outside_suboptimal_set;  // fast-instance rounds only
};

/// Callback through which a policy interacts with the world in one round.
class Environment {
 public:
  virtual ~Environment() = default;
  /// Receives Phi_t before the draw; the adversary commits here.
  virtual void commit(const SelectionPlan& plan) = 0;
  /// Returns the corrupted noisy observation at the drawn grid point.
  virtual double query(std::size_t grid_index) = 0;
};

struct Coverage {
  bool primary = true;
  std::optional<bool> slow;
};

class Policy {
 public:
  virtual ~Policy() = default;

  [[nodiscard]] virtual PolicyKind kind() const = 0;
  [[nodiscard]] virtual SelectionPlan plan() const = 0;
  /// Index into plan.entries. The default draws categorically with one uniform.
  [[nodiscard]] virtual std::size_t draw(const SelectionPlan& plan, Rng& rng) const;
  virtual StepOutcome observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) = 0;

  /// Rounds attributed to each instance or layer; sums to the rounds played.
  [[nodiscard]] virtual std::vector<std::size_t> round_counts() const = 0;
  /// Whether the policy's current bounds contain f at every grid point.
  [[nodiscard]] virtual Coverage coverage(std::span<const double> f) const = 0;
  [[nodiscard]] virtual std::uint64_t digest() const = 0;
  [[nodiscard]] virtual std::unique_ptr<Policy> clone() const = 0;

  [[nodiscard]] std::size_t rounds() const;

  /// plan -> env.commit -> draw -> env.query -> observe.
  StepOutcome step(Environment& env, Rng& rng);
};

double gamma_of(const PosteriorState& post, GammaMode mode);

/// argmax over the grid of mu + beta sigma, lowest index on ties.
std::size_t vanilla_ucb_select(const PosteriorState& post, double beta);
/// argmax of mu_tilde + beta^(A1)_t sigma with t = |history| + 1.
std::size_t alg1_select(const PosteriorState& post, const BetaSchedule& schedule);

/// GP-UCB (Standard schedule) or its known-C enlargement (KnownC schedule).
class SingleInstanceUcb final : public Policy {
 public:
  SingleInstanceUcb(GridKernelPtr kernel, const PolicySpec& spec);
  /// Explicit schedule; `kind` must be VanillaUcb or KnownC.
  SingleInstanceUcb(GridKernelPtr kernel, PolicyKind kind, BetaSchedule schedule, double lambda,
                    GammaMode gamma_mode, std::size_t reserve = 0);

  [[nodiscard]] PolicyKind kind() const override { return kind_; }
  [[nodiscard]] SelectionPlan plan() const override;
  StepOutcome observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) override;
  [[nodiscard]] std::vector<std::size_t> round_counts() const override { return {rounds_}; }
  [[nodiscard]] Coverage coverage(std::span<const double> f) const override;
  [[nodiscard]] std::uint64_t digest() const override { return post_.digest(); }
  [[nodiscard]] std::unique_ptr<Policy> clone() const override;

  /// Condition on an observation without counting it as a played round.
  void absorb(std::size_t grid_index, double y);

  [[nodiscard]] const PosteriorState& posterior() const { return post_; }
  [[nodiscard]] const BetaSchedule& schedule() const { return schedule_; }
  [[nodiscard]] double current_beta() const;

 private:
  PolicyKind kind_;
  BetaSchedule schedule_;
  GammaMode gamma_mode_;
  PosteriorState post_;
  std::size_t rounds_ = 0;
};

/// Fast/slow randomized scheme for a known-or-zero corruption level C.
///
/// While valid, each round plays the slow instance S with probability
/// min(1, 1/C) and the fast instance F otherwise. F maximizes the smaller of
/// both instances' intersected alpha=1 upper bounds; S maximizes its own
/// alpha-scaled upper bound. Each observation updates only the instance
/// that played. Once F's intersected upper bound drops below S's intersected
/// lower bound anywhere, the policy switches permanently to the known-C
/// rule on the pooled history.
class FastSlowUcb final : public Policy {
 public:
  FastSlowUcb(GridKernelPtr kernel, const PolicySpec& spec);

  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::FastSlow; }
  [[nodiscard]] SelectionPlan plan() const override;
  StepOutcome observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) override;
  /// {t_F, t_S, rounds after the switch}.
  [[nodiscard]] std::vector<std::size_t> round_counts() const override;
  [[nodiscard]] Coverage coverage(std::span<const double> f) const override;
  [[nodiscard]] std::uint64_t digest() const override;
  [[nodiscard]] std::unique_ptr<Policy> clone() const override;

  [[nodiscard]] bool is_valid() const { return valid_; }
  [[nodiscard]] double slow_probability() const { return p_slow_; }
  [[nodiscard]] const PosteriorState& fast_posterior() const { return fast_; }
  [[nodiscard]] const PosteriorState& slow_posterior() const { return slow_; }
  [[nodiscard]] const IntersectedBounds& fast_bounds() const { return fast_bar_; }
  [[nodiscard]] const IntersectedBounds& slow_bounds() const { return slow_bar_; }
  /// Known-C state on all collected data; present after the switch.
  [[nodiscard]] const SingleInstanceUcb* pooled() const { return pooled_ ? &*pooled_ : nullptr; }
  /// (grid index, y_tilde) in arrival order, across both instances.
  [[nodiscard]] const std::vector<std::pair<std::size_t, double>>& arrivals() const {
    return arrivals_;
  }
  [[nodiscard]] const BetaSchedule& fast_schedule() const { return fast_schedule_; }
  [[nodiscard]] const BetaSchedule& slow_schedule() const { return slow_schedule_; }
  [[nodiscard]] const BetaSchedule& pooled_schedule() const { return pooled_schedule_; }

  /// A fast-instance selection never lies in the slow instance's
  /// strictly-suboptimal set.
  [[nodiscard]] bool fastslow_assert_lemma6(std::size_t selected) const;

  /// Entry index of each instance in plan() while valid.
  static constexpr std::size_t kSlowEntry = 0;
  static constexpr std::size_t kFastEntry = 1;

 private:
  void refresh(Instance which);

  GridKernelPtr kernel_;
  PolicyParams params_;
  double C_;
  double p_slow_;
  BetaSchedule fast_schedule_;
  BetaSchedule slow_schedule_;
  BetaSchedule pooled_schedule_;
  PosteriorState fast_;
  PosteriorState slow_;
  IntersectedBounds fast_bar_;
  IntersectedBounds slow_bar_;
  bool valid_ = true;
  std::optional<SingleInstanceUcb> pooled_;
  std::vector<std::pair<std::size_t, double>> arrivals_;
  std::size_t t_fast_ = 0;
  std::size_t t_slow_ = 0;
  std::size_t t_pooled_ = 0;
};

/// Number of layers ceil(log2 T), at least 1.
std::size_t num_layers_for(std::size_t horizon);

/// Layer l >= 2 with probability 2^{-l}; the remaining mass goes to layer 1.
std::size_t layer_sample(std::size_t num_layers, Rng& rng);
/// Exact sampling probability of `layer`.
double layer_probability(std::size_t num_layers, std::size_t layer);

/// ceil(log2 C) clamped to [1, num_layers_for(T)].
std::size_t robust_layer_index(double C, std::size_t horizon);

/// Layered scheme for an unknown corruption level.
///
/// Layer l is sampled with probability 2^{-l}. Each layer keeps its own
/// posterior, intersected bounds and potential-maximizer set; a layer only
/// plays inside its set. If the sampled layer's set is empty, the lowest
/// non-empty layer above it plays, and no state is updated that round.
class LayeredUcb final : public Policy {
 public:
  LayeredUcb(GridKernelPtr kernel, const PolicySpec& spec);

  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::LayeredUnknownC; }
  [[nodiscard]] SelectionPlan plan() const override;
  [[nodiscard]] std::size_t draw(const SelectionPlan& plan, Rng& rng) const override;
  StepOutcome observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) override;
  /// Rounds in which each layer chose the point (fallback rounds count for
  /// the layer that actually played).
  [[nodiscard]] std::vector<std::size_t> round_counts() const override { return selections_; }
  [[nodiscard]] Coverage coverage(std::span<const double> f) const override;
  [[nodiscard]] std::uint64_t digest() const override;
  [[nodiscard]] std::unique_ptr<Policy> clone() const override;

  [[nodiscard]] std::size_t num_layers() const { return posts_.size(); }
  [[nodiscard]] const PosteriorState& posterior(std::size_t layer) const { return posts_.at(layer - 1); }
  [[nodiscard]] const IntersectedBounds& bounds(std::size_t layer) const { return bars_.at(layer - 1); }
  [[nodiscard]] const MaximizerSets& maximizer_sets() const { return sets_; }
  [[nodiscard]] const BetaSchedule& schedule() const { return schedule_; }
  [[nodiscard]] std::size_t fallback_rounds() const { return fallback_rounds_; }
  [[nodiscard]] std::size_t all_empty_events() const { return all_empty_events_; }

  /// Replace the maximizer sets. Used to construct specific states in tests.
  void set_maximizer_sets(MaximizerSets sets);

 private:
  void refresh(std::size_t layer);
  [[nodiscard]] double beta_for(std::size_t layer) const;

  GridKernelPtr kernel_;
  PolicyParams params_;
  BetaSchedule schedule_;
  std::vector<PosteriorState> posts_;
  std::vector<IntersectedBounds> bars_;
  MaximizerSets sets_;
  std::vector<std::size_t> selections_;
  std::size_t fallback_rounds_ = 0;
  std::size_t all_empty_events_ = 0;
};

std::unique_ptr<Policy> make_policy(GridKernelPtr kernel, const PolicySpec& spec);

/// Per-round inputs of the reporting rule.
struct ReportRow {
  std::size_t index;
  double mean;  // mu_tilde_{t-1}(x_t)
  double std;   // sigma_{t-1}(x_t)
  double beta;  // beta_t
};

struct ReportedPoint {
  std::size_t index;   // grid index of x_{t*}
  std::size_t t_star;  // 1-based round
};

/// x_{t*} with t* = argmax_t { mean_t - (C + beta_t) std_t }, earliest on ties.
ReportedPoint simple_regret_report(std::span<const ReportRow> trace, double C);

}  // namespace ctgp
