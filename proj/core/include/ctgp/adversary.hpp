#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctgp/kernels.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {

/// Sup-norm corruption budget. Invariants: spent <= budget, spent equals
/// the running sum of charges.
class CorruptionLedger {
 public:
  explicit CorruptionLedger(double budget);

  [[nodiscard]] double budget() const { return budget_; }
  [[nodiscard]] double spent() const { return spent_; }
  [[nodiscard]] double remaining() const;
  [[nodiscard]] bool exhausted() const { return remaining() <= 0.0; }
  [[nodiscard]] const std::vector<double>& charges() const { return charges_; }

  /// Records a charge; throws InternalError if it would exceed the budget.
  void charge(double amount);

 private:
  double budget_;
  double spent_ = 0.0;
  std::vector<double> charges_;
};

/// Clean past observation seen by the adversary.
struct CleanObservation {
  std::size_t index;
  double y;
};

/// Everything the adversary may condition on at round t. The draw x_t is
/// deliberately absent.
struct AdversaryContext {
  std::span<const double> f;
  const DomainGrid* grid = nullptr;
  std::span<const CleanObservation> history;
  const SelectionPlan* plan = nullptr;
  std::size_t round = 1;
};

struct CorruptionFunction {
  std::vector<double> values;

  [[nodiscard]] double sup_norm() const;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  /// Unconstrained proposal; adversary_commit enforces range and budget.
  [[nodiscard]] virtual std::vector<double> propose(const AdversaryContext& ctx) const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::unique_ptr<Adversary> clone() const = 0;
};

/// Clips the proposal to [-B0, B0], scales it uniformly into the remaining
/// budget and charges its sup norm.
CorruptionFunction adversary_commit(const Adversary& strategy, const AdversaryContext& ctx,
                                    CorruptionLedger& ledger, double B0);

class ZeroAdversary final : public Adversary {
 public:
  [[nodiscard]] std::vector<double> propose(const AdversaryContext& ctx) const override;
  [[nodiscard]] std::string name() const override { return "zero"; }
  [[nodiscard]] std::unique_ptr<Adversary> clone() const override;
};

/// c(x) = -f(x*)/3 on the ball of `radius` around x*, zero elsewhere.
/// Unless `always_active`, it only corrupts when Phi_t puts mass on the ball.
class RegionAdversary final : public Adversary {
 public:
  RegionAdversary(double radius, bool always_active = false, double fraction = 1.0 / 3.0);

  [[nodiscard]] std::vector<double> propose(const AdversaryContext& ctx) const override;
  [[nodiscard]] std::string name() const override { return "region"; }
  [[nodiscard]] std::unique_ptr<Adversary> clone() const override;

  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] bool always_active() const { return always_active_; }
  [[nodiscard]] double fraction() const { return fraction_; }

 private:
  double radius_;
  bool always_active_;
  double fraction_;
};

/// c(x) = -f(x).
class FlattenAdversary final : public Adversary {
 public:
  [[nodiscard]] std::vector<double> propose(const AdversaryContext& ctx) const override;
  [[nodiscard]] std::string name() const override { return "flatten"; }
  [[nodiscard]] std::unique_ptr<Adversary> clone() const override;
};

/// +delta within `radius` of the target point, -delta within `radius` of x*.
class SwapAdversary final : public Adversary {
 public:
  SwapAdversary(std::size_t target_index, double delta, double radius = 0.0);

  [[nodiscard]] std::vector<double> propose(const AdversaryContext& ctx) const override;
  [[nodiscard]] std::string name() const override { return "swap"; }
  [[nodiscard]] std::unique_ptr<Adversary> clone() const override;

 private:
  std::size_t target_;
  double delta_;
  double radius_;
};

enum class AdversaryKind { Zero, Region, Flatten, Swap };

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::Zero;
  double budget = 0.0;  // C
  double radius = 0.0;  // region and swap
  bool always_active = false;
  double fraction = 1.0 / 3.0;  // region magnitude as a fraction of f(x*)
  std::size_t target_index = 0;
  double delta = 0.0;

  bool operator==(const AdversarySpec&) const = default;
};

std::string adversary_label(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary_kind(const std::string& label);

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec);

}  // namespace ctgp
