#include <cmath>

#include "ctgp/errors.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {
namespace {

BetaSchedule schedule_for(const PolicySpec& spec) {
  validate(spec);
  if (spec.kind == PolicyKind::VanillaUcb) return BetaSchedule(spec.params.beta, StandardBeta{});
  if (spec.kind == PolicyKind::KnownC) {
    return BetaSchedule(spec.params.beta, KnownCBeta{*spec.params.C});
  }
  throw ConfigError("SingleInstanceUcb: policy kind must be gp_ucb or known_c");
}

}  // namespace

SingleInstanceUcb::SingleInstanceUcb(GridKernelPtr kernel, const PolicySpec& spec)
    : SingleInstanceUcb(std::move(kernel), spec.kind, schedule_for(spec), spec.params.beta.lambda,
                        spec.params.gamma_mode, spec.params.horizon) {}

SingleInstanceUcb::SingleInstanceUcb(GridKernelPtr kernel, PolicyKind kind, BetaSchedule schedule,
                                     double lambda, GammaMode gamma_mode, std::size_t reserve)
    : kind_(kind),
      schedule_(schedule),
      gamma_mode_(gamma_mode),
      post_(std::move(kernel), lambda) {
  if (kind_ != PolicyKind::VanillaUcb && kind_ != PolicyKind::KnownC) {
    throw ConfigError("SingleInstanceUcb: policy kind must be gp_ucb or known_c");
  }
  if (reserve > 0) post_.reserve(reserve);
}

double SingleInstanceUcb::current_beta() const {
  return schedule_(post_.size() + 1, gamma_of(post_, gamma_mode_));
}

SelectionPlan SingleInstanceUcb::plan() const {
  PlanEntry e;
  e.instance = kind_ == PolicyKind::VanillaUcb ? Instance::Ucb : Instance::KnownC;
  e.probability = 1.0;
  e.index = vanilla_ucb_select(post_, current_beta());
  return SelectionPlan{{e}};
}

StepOutcome SingleInstanceUcb::observe(const SelectionPlan& plan, std::size_t entry,
                                       double y_tilde) {
  const PlanEntry& e = plan.entries.at(entry);
  StepOutcome out;
  out.index = e.index;
  out.instance = e.instance;
  out.mean = post_.mean_at(e.index);
  out.std = post_.std_at(e.index);
  out.beta = current_beta();
  post_.append_grid(e.index, y_tilde);
  ++rounds_;
  return out;
}

Coverage SingleInstanceUcb::coverage(std::span<const double> f) const {
  const double beta = current_beta();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(post_.mean_at(i) - f[i]) > beta * post_.std_at(i)) return {false, std::nullopt};
  }
  return {true, std::nullopt};
}

std::unique_ptr<Policy> SingleInstanceUcb::clone() const {
  return std::make_unique<SingleInstanceUcb>(*this);
}

void SingleInstanceUcb::absorb(std::size_t grid_index, double y) {
  post_.append_grid(grid_index, y);
}

}  // namespace ctgp
