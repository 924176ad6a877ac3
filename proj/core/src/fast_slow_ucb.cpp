#include <algorithm>
#include <cmath>
#include <limits>

#include "ctgp/errors.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {
namespace {

// Each of the fast, slow and post-switch confidence events runs at delta / 5.
constexpr double kFastSlowSplit = 5.0;

const PolicySpec& checked(const PolicySpec& spec) {
  validate(spec);
  if (spec.kind != PolicyKind::FastSlow) throw ConfigError("FastSlowUcb: wrong policy kind");
  return spec;
}

}  // namespace

FastSlowUcb::FastSlowUcb(GridKernelPtr kernel, const PolicySpec& spec)
    : kernel_(kernel),
      params_(checked(spec).params),
      C_(*spec.params.C),
      p_slow_(C_ <= 1.0 ? 1.0 : 1.0 / C_),
      fast_schedule_(params_.beta, StandardBeta{}, kFastSlowSplit),
      slow_schedule_(params_.beta, SlowInstanceBeta{}, kFastSlowSplit),
      pooled_schedule_(params_.beta, KnownCBeta{C_}, kFastSlowSplit),
      fast_(kernel, params_.beta.lambda),
      slow_(kernel, params_.beta.lambda),
      fast_bar_(kernel->size()),
      slow_bar_(kernel->size()) {
  fast_.reserve(params_.horizon);
  slow_.reserve(params_.horizon);
  refresh(Instance::Fast);
  refresh(Instance::Slow);
}

void FastSlowUcb::refresh(Instance which) {
  const bool fast = which == Instance::Fast;
  const PosteriorState& post = fast ? fast_ : slow_;
  const BetaSchedule& sched = fast ? fast_schedule_ : slow_schedule_;
  const double beta = sched(post.size() + 1, gamma_of(post, params_.gamma_mode));
  (fast ? fast_bar_ : slow_bar_).update(bounds_snapshot(post, beta, 1.0));
}

SelectionPlan FastSlowUcb::plan() const {
  const std::size_t n = kernel_->size();
  if (!valid_) {
    PlanEntry e;
    e.instance = Instance::Pooled;
    e.probability = 1.0;
    e.index = pooled_->plan().entries.front().index;
    return SelectionPlan{{e}};
  }

  PlanEntry slow;
  slow.instance = Instance::Slow;
  slow.probability = p_slow_;
  {
    const double beta = slow_schedule_(slow_.size() + 1, gamma_of(slow_, params_.gamma_mode));
    const double width = params_.alpha * beta;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = slow_.mean_at(i) + width * slow_.std_at(i);
      if (v > best) {
        best = v;
        slow.index = i;
      }
    }
  }

  PlanEntry fast;
  fast.instance = Instance::Fast;
  fast.probability = 1.0 - p_slow_;
  {
    const auto uf = fast_bar_.ucb();
    const auto us = slow_bar_.ucb();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::min(uf[i], us[i]);
      if (v > best) {
        best = v;
        fast.index = i;
      }
    }
  }

  SelectionPlan p;
  p.entries.resize(2);
  p.entries[kSlowEntry] = slow;
  p.entries[kFastEntry] = fast;
  return p;
}

bool FastSlowUcb::fastslow_assert_lemma6(std::size_t selected) const {
  return !is_suboptimal(slow_bar_, selected);
}

StepOutcome FastSlowUcb::observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) {
  const PlanEntry& e = plan.entries.at(entry);
  StepOutcome out;
  out.index = e.index;
  out.instance = e.instance;

  if (e.instance == Instance::Pooled) {
    if (valid_ || !pooled_) throw InternalError("fast_slow: pooled entry while still valid");
    const auto& post = pooled_->posterior();
    out.mean = post.mean_at(e.index);
    out.std = post.std_at(e.index);
    out.beta = pooled_->current_beta();
    pooled_->observe(plan, entry, y_tilde);
    arrivals_.emplace_back(e.index, y_tilde);
    ++t_pooled_;
    out.is_valid = false;
    return out;
  }
  if (!valid_) throw InternalError("fast_slow: instance entry after the switch");

  const bool fast = e.instance == Instance::Fast;
  PosteriorState& post = fast ? fast_ : slow_;
  const BetaSchedule& sched = fast ? fast_schedule_ : slow_schedule_;
  out.mean = post.mean_at(e.index);
  out.std = post.std_at(e.index);
  out.beta = sched(post.size() + 1, gamma_of(post, params_.gamma_mode));
  if (fast) out.outside_suboptimal_set = fastslow_assert_lemma6(e.index);

  post.append_grid(e.index, y_tilde);
  arrivals_.emplace_back(e.index, y_tilde);
  if (fast) {
    ++t_fast_;
  } else {
    ++t_slow_;
  }
  refresh(e.instance);

  if (switch_condition(fast_bar_, slow_bar_)) {
    valid_ = false;
    out.switched = true;
    pooled_.emplace(kernel_, PolicyKind::KnownC, pooled_schedule_, params_.beta.lambda,
                    params_.gamma_mode, params_.horizon);
    for (const auto& [idx, y] : arrivals_) pooled_->absorb(idx, y);
  }
  out.is_valid = valid_;
  return out;
}

std::vector<std::size_t> FastSlowUcb::round_counts() const { return {t_fast_, t_slow_, t_pooled_}; }

Coverage FastSlowUcb::coverage(std::span<const double> f) const {
  Coverage c;
  if (!valid_) {
    c.primary = pooled_->coverage(f).primary;
  } else {
    c.primary = fast_bar_.contains(f);
  }
  c.slow = slow_bar_.contains(f);
  return c;
}

std::uint64_t FastSlowUcb::digest() const {
  std::uint64_t h = fast_.digest() * 31 + slow_.digest();
  for (double v : fast_bar_.ucb()) h = h * 1099511628211ULL ^ std::hash<double>{}(v);
  for (double v : slow_bar_.lcb()) h = h * 1099511628211ULL ^ std::hash<double>{}(v);
  h = h * 31 + (valid_ ? 1 : 0);
  if (pooled_) h = h * 31 + pooled_->digest();
  return h;
}

std::unique_ptr<Policy> FastSlowUcb::clone() const { return std::make_unique<FastSlowUcb>(*this); }

}  // namespace ctgp
