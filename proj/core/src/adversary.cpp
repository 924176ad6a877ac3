#include "ctgp/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "ctgp/errors.hpp"

namespace ctgp {

CorruptionLedger::CorruptionLedger(double budget) : budget_(budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ConfigError("corruption budget must be finite and >= 0");
}

double CorruptionLedger::remaining() const { return std::max(0.0, budget_ - spent_); }

void CorruptionLedger::charge(double amount) {
  if (!(amount >= 0.0)) throw InternalError("ledger: negative charge");
  if (spent_ + amount > budget_) throw InternalError("ledger: charge exceeds budget");
  spent_ += amount;
  charges_.push_back(amount);
}

double CorruptionFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

CorruptionFunction adversary_commit(const Adversary& strategy, const AdversaryContext& ctx,
                                    CorruptionLedger& ledger, double B0) {
  CorruptionFunction c;
  c.values = strategy.propose(ctx);
  if (c.values.size() != ctx.f.size()) throw InternalError("adversary proposal has wrong length");
  for (double& v : c.values) {
    if (!std::isfinite(v)) v = 0.0;
    v = std::clamp(v, -B0, B0);
  }

  const double remaining = ledger.remaining();
  double sup = c.sup_norm();
  if (sup > remaining) {
    const double scale = remaining / sup;
    for (double& v : c.values) v *= scale;
    sup = c.sup_norm();
    // Rounding in the scale can overshoot the remaining budget by an ulp.
    while (ledger.spent() + sup > ledger.budget() && sup > 0.0) {
      const double target = std::nextafter(sup, 0.0);
      for (double& v : c.values) {
        if (std::abs(v) > target) v = std::copysign(target, v);
      }
      sup = c.sup_norm();
    }
  }
  ledger.charge(sup);
  return c;
}

std::vector<double> ZeroAdversary::propose(const AdversaryContext& ctx) const {
  return std::vector<double>(ctx.f.size(), 0.0);
}

std::unique_ptr<Adversary> ZeroAdversary::clone() const { return std::make_unique<ZeroAdversary>(*this); }

namespace {

std::size_t argmax_f(std::span<const double> f) {
  return argmax_lowest(f);
}

std::vector<std::size_t> ball_indices(const AdversaryContext& ctx, std::size_t center, double radius) {
  if (!ctx.grid) throw InternalError("adversary context without grid");
  return ctx.grid->ball(ctx.grid->point(center), radius);
}

}  // namespace

RegionAdversary::RegionAdversary(double radius, bool always_active, double fraction)
    : radius_(radius), always_active_(always_active), fraction_(fraction) {
  if (!(radius >= 0.0)) throw ConfigError("region adversary radius must be >= 0");
  if (!(fraction >= 0.0)) throw ConfigError("region adversary fraction must be >= 0");
}

std::vector<double> RegionAdversary::propose(const AdversaryContext& ctx) const {
  std::vector<double> c(ctx.f.size(), 0.0);
  const std::size_t star = argmax_f(ctx.f);
  const auto region = ball_indices(ctx, star, radius_);
  bool active = always_active_;
  if (!active && ctx.plan) {
    for (std::size_t i : region) {
      if (ctx.plan->probability_of(i) > 0.0) {
        active = true;
        break;
      }
    }
  }
  if (!active) return c;
  const double value = -fraction_ * ctx.f[star];
  for (std::size_t i : region) c[i] = value;
  return c;
}

std::unique_ptr<Adversary> RegionAdversary::clone() const { return std::make_unique<RegionAdversary>(*this); }

std::vector<double> FlattenAdversary::propose(const AdversaryContext& ctx) const {
  std::vector<double> c(ctx.f.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -ctx.f[i];
  return c;
}

std::unique_ptr<Adversary> FlattenAdversary::clone() const { return std::make_unique<FlattenAdversary>(*this); }

SwapAdversary::SwapAdversary(std::size_t target_index, double delta, double radius)
    : target_(target_index), delta_(delta), radius_(radius) {
  if (!(delta >= 0.0)) throw ConfigError("swap adversary delta must be >= 0");
  if (!(radius >= 0.0)) throw ConfigError("swap adversary radius must be >= 0");
}

std::vector<double> SwapAdversary::propose(const AdversaryContext& ctx) const {
  std::vector<double> c(ctx.f.size(), 0.0);
  if (target_ >= c.size()) throw ConfigError("swap adversary target index outside the grid");
  const std::size_t star = argmax_f(ctx.f);
  for (std::size_t i : ball_indices(ctx, star, radius_)) c[i] = -delta_;
  for (std::size_t i : ball_indices(ctx, target_, radius_)) c[i] = delta_;
  return c;
}

std::unique_ptr<Adversary> SwapAdversary::clone() const { return std::make_unique<SwapAdversary>(*this); }

std::string adversary_label(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Zero: return "zero";
    case AdversaryKind::Region: return "region";
    case AdversaryKind::Flatten: return "flatten";
    case AdversaryKind::Swap: return "swap";
  }
  return "zero";
}

std::optional<AdversaryKind> parse_adversary_kind(const std::string& label) {
  for (auto k : {AdversaryKind::Zero, AdversaryKind::Region, AdversaryKind::Flatten, AdversaryKind::Swap}) {
    if (adversary_label(k) == label) return k;
  }
  return std::nullopt;
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec) {
  switch (spec.kind) {
    case AdversaryKind::Zero: return std::make_unique<ZeroAdversary>();
    case AdversaryKind::Region:
      return std::make_unique<RegionAdversary>(spec.radius, spec.always_active, spec.fraction);
    case AdversaryKind::Flatten: return std::make_unique<FlattenAdversary>();
    case AdversaryKind::Swap: return std::make_unique<SwapAdversary>(spec.target_index, spec.delta, spec.radius);
  }
  throw ConfigError("unknown adversary kind");
}

}  // namespace ctgp
