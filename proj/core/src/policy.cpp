#include <algorithm>
#include <cmath>
#include <limits>

#include "ctgp/errors.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {

std::string_view policy_label(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::VanillaUcb:
      return "gp_ucb";
    case PolicyKind::KnownC:
      return "known_c";
    case PolicyKind::FastSlow:
      return "fast_slow";
    case PolicyKind::LayeredUnknownC:
      return "layered";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view label) {
  for (auto k : {PolicyKind::VanillaUcb, PolicyKind::KnownC, PolicyKind::FastSlow,
                 PolicyKind::LayeredUnknownC}) {
    if (policy_label(k) == label) return k;
  }
  return std::nullopt;
}

std::string instance_label(Instance instance, std::size_t layer) {
  switch (instance) {
    case Instance::Ucb:
      return "UCB";
    case Instance::KnownC:
      return "A1";
    case Instance::Fast:
      return "F";
    case Instance::Slow:
      return "S";
    case Instance::Pooled:
      return "pooled";
    case Instance::Layer:
      return "L" + std::to_string(layer);
  }
  return "?";
}

void validate(const PolicySpec& spec) {
  const auto& p = spec.params;
  if (!(p.beta.delta > 0.0 && p.beta.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(p.beta.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(p.alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
  if (p.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (p.C && !(*p.C >= 0.0)) throw ConfigError("C must be non-negative");
  const bool needs_c = spec.kind == PolicyKind::KnownC || spec.kind == PolicyKind::FastSlow;
  if (needs_c && !p.C) {
    throw ConfigError(std::string(policy_label(spec.kind)) + " requires a corruption level C");
  }
  if (spec.kind == PolicyKind::LayeredUnknownC && p.C) {
    throw ConfigError("layered policy must not be given the corruption level C");
  }
}

double SelectionPlan::probability_of(std::size_t grid_index) const {
  double p = 0.0;
  for (const auto& e : entries) {
    if (e.index == grid_index) p += e.probability;
  }
  return p;
}

std::size_t Policy::draw(const SelectionPlan& plan, Rng& rng) const {
  if (plan.entries.empty()) throw InternalError("draw: empty plan");
  if (plan.entries.size() == 1) return 0;
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const double p = plan.entries[i].probability;
    if (p <= 0.0) continue;
    last_positive = i;
    cum += p;
    if (u < cum) return i;
  }
  return last_positive;
}

std::size_t Policy::rounds() const {
  const auto counts = round_counts();
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

StepOutcome Policy::step(Environment& env, Rng& rng) {
  const SelectionPlan p = plan();
  env.commit(p);
  const std::size_t entry = draw(p, rng);
  const double y = env.query(p.entries[entry].index);
  return observe(p, entry, y);
}

double gamma_of(const PosteriorState& post, GammaMode mode) {
  switch (mode) {
    case GammaMode::Realized:
      return post.info_gain();
    case GammaMode::AnalyticSE: {
      const double d = static_cast<double>(post.grid_kernel().grid().dim());
      return std::pow(std::log1p(static_cast<double>(post.size())), d + 1.0);
    }
  }
  return post.info_gain();
}

std::size_t vanilla_ucb_select(const PosteriorState& post, double beta) {
  if (!(beta > 0.0)) throw ConfigError("vanilla_ucb_select: beta must be positive");
  const std::size_t n = post.grid_kernel().size();
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = post.mean_at(i) + beta * post.std_at(i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

std::size_t alg1_select(const PosteriorState& post, const BetaSchedule& schedule) {
  return vanilla_ucb_select(post, schedule(post.size() + 1, post.info_gain()));
}

std::unique_ptr<Policy> make_policy(GridKernelPtr kernel, const PolicySpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::VanillaUcb:
    case PolicyKind::KnownC:
      return std::make_unique<SingleInstanceUcb>(std::move(kernel), spec);
    case PolicyKind::FastSlow:
      return std::make_unique<FastSlowUcb>(std::move(kernel), spec);
    case PolicyKind::LayeredUnknownC:
      return std::make_unique<LayeredUcb>(std::move(kernel), spec);
  }
  throw ConfigError("unknown policy kind");
}

ReportedPoint simple_regret_report(std::span<const ReportRow> trace, double C) {
  if (trace.empty()) throw InputError("simple_regret_report: empty trace");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& r = trace[t];
    const double score = r.mean - (C + r.beta) * r.std;
    if (score > best_score) {
      best_score = score;
      best = t;
    }
  }
  return {trace[best].index, best + 1};
}

}  // namespace ctgp
