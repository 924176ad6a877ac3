#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ctgp/posterior.hpp"

namespace ctgp {

/// Parameters shared by every exploration schedule.
struct BetaParams {
  double B = 1.0;       // RKHS norm bound
  double B0 = 1.0;      // range bound |f| <= B0
  double sigma = 0.0;   // true noise standard deviation
  double lambda = 1.0;  // regularizer of the posterior
  double delta = 0.1;   // confidence parameter in (0, 1)

  bool operator==(const BetaParams&) const = default;
};

struct StandardBeta {};
/// Enlarged by lambda^{-1/2} C for a known corruption level C.
struct KnownCBeta {
  double C;
};
/// Slow instance of the fast/slow scheme: enlarged by
/// lambda^{-1/2} (3 + B0 ln(1/delta_eff)).
struct SlowInstanceBeta {};
/// Per-layer schedule of the unknown-C scheme; the confidence parameter is
/// split across layers as delta / (4 (1 + log2 T)).
struct LayeredBeta {
  std::size_t horizon;
};

/// beta_t = B + sigma lambda^{-1/2} sqrt(2 (gamma_{t-1} + ln(1/delta_eff)))
///          + variant-specific enlargement,
/// where delta_eff = delta / split. `split` lets a composite algorithm run
/// each event at a fraction of the overall confidence budget.
class BetaSchedule {
 public:
  using Variant = std::variant<StandardBeta, KnownCBeta, SlowInstanceBeta, LayeredBeta>;

  BetaSchedule(BetaParams params, Variant variant, double split = 1.0);

  /// `t` >= 1 is the round index, `gamma_hat` the information gain after
  /// t - 1 observations.
  [[nodiscard]] double operator()(std::size_t t, double gamma_hat) const;

  [[nodiscard]] double effective_delta() const { return params_.delta / split_; }
  [[nodiscard]] const BetaParams& params() const { return params_; }
  [[nodiscard]] const Variant& variant() const { return variant_; }
  [[nodiscard]] double split() const { return split_; }

 private:
  BetaParams params_;
  Variant variant_;
  double split_;
};

double beta_eval(const BetaSchedule& schedule, std::size_t t, double gamma_hat);

struct BoundsSnapshot {
  std::vector<double> ucb;
  std::vector<double> lcb;
};

/// ucb = mu + alpha beta sigma, lcb = mu - alpha beta sigma over the grid.
BoundsSnapshot bounds_snapshot(const PosteriorState& post, double beta, double alpha);

/// Running pointwise minimum of upper bounds and maximum of lower bounds.
/// Before the first update the bounds are +inf / -inf.
class IntersectedBounds {
 public:
  explicit IntersectedBounds(std::size_t grid_size);

  void update(const BoundsSnapshot& snapshot);

  [[nodiscard]] std::span<const double> ucb() const { return ucb_; }
  [[nodiscard]] std::span<const double> lcb() const { return lcb_; }
  [[nodiscard]] std::size_t size() const { return ucb_.size(); }
  [[nodiscard]] std::size_t updates() const { return updates_; }

  /// True iff lcb(x) <= f(x) <= ucb(x) at every grid point.
  [[nodiscard]] bool contains(std::span<const double> f) const;

  bool operator==(const IntersectedBounds&) const = default;

 private:
  std::vector<double> ucb_;
  std::vector<double> lcb_;
  std::size_t updates_ = 0;
};

/// True iff some grid point has fast.ucb strictly below slow.lcb.
bool switch_condition(const IntersectedBounds& fast, const IntersectedBounds& slow);

/// Grid points whose upper bound lies strictly below the largest lower bound.
std::vector<std::size_t> suboptimal_set(const IntersectedBounds& slow);
bool is_suboptimal(const IntersectedBounds& slow, std::size_t index);

/// Potential-maximizer sets, one membership mask per layer (layers are
/// numbered 1..num_layers). Every layer starts as the full grid.
class MaximizerSets {
 public:
  MaximizerSets(std::size_t num_layers, std::size_t grid_size);

  /// Recompute layer `layer` from its intersected alpha=1 bounds, intersect
  /// with its previous value, then intersect every lower layer with it.
  void update(std::size_t layer, const IntersectedBounds& bounds);

  [[nodiscard]] bool contains(std::size_t layer, std::size_t index) const;
  [[nodiscard]] bool empty(std::size_t layer) const;
  [[nodiscard]] std::size_t count(std::size_t layer) const;
  [[nodiscard]] std::span<const char> mask(std::size_t layer) const;
  [[nodiscard]] std::size_t num_layers() const { return sets_.size(); }
  [[nodiscard]] std::size_t grid_size() const { return grid_size_; }

  /// Overwrite one layer's membership. Intended for constructing states in
  /// tests and diagnostics; does not enforce nesting.
  void assign(std::size_t layer, std::vector<char> mask);

  /// M(1) subset of M(2) subset of ... subset of M(L).
  [[nodiscard]] bool nested() const;
  /// Every layer of *this is a subset of the same layer of `earlier`.
  [[nodiscard]] bool subset_of(const MaximizerSets& earlier) const;

  bool operator==(const MaximizerSets&) const = default;

 private:
  std::vector<std::vector<char>> sets_;
  std::size_t grid_size_;
};

/// Smallest tau in [1, horizon] with sqrt(16 alpha^2 beta(tau)^2 gamma(tau) / tau) <= delta0 / 10,
/// or nullopt if the condition is not met within the horizon.
std::optional<std::size_t> elimination_time(double delta0,
                                            const std::function<double(std::size_t)>& beta,
                                            const std::function<double(std::size_t)>& gamma,
                                            double alpha, std::size_t horizon);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);
/// Same, restricted to entries with mask[i] != 0. Returns nullopt if the mask is empty.
std::optional<std::size_t> argmax_lowest(std::span<const double> values, std::span<const char> mask);

}  // namespace ctgp
