#include "ctgp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ctgp/errors.hpp"

namespace ctgp {
namespace {

class SimEnvironment final : public Environment {
 public:
  SimEnvironment(const RunSpec& spec, double noise_std, Rng noise)
      : spec_(spec),
        noise_std_(noise_std),
        noise_(noise),
        adversary_(make_adversary(spec.adversary)),
        ledger_(spec.adversary.budget) {}

  void commit(const SelectionPlan& plan) override {
    AdversaryContext ctx;
    ctx.f = spec_.objective.values;
    ctx.grid = &spec_.kernel->grid();
    ctx.history = history_;
    ctx.plan = &plan;
    ctx.round = round_;
    corruption_ = adversary_commit(*adversary_, ctx, ledger_, spec_.objective.B0);
    committed_ = true;
  }

  double query(std::size_t index) override {
    if (!committed_) throw InternalError("environment queried before the adversary committed");
    committed_ = false;
    y_clean_ = spec_.objective.values.at(index) + noise_.normal(0.0, noise_std_);
    c_ = corruption_.values[index];
    history_.push_back({index, y_clean_});
    ++round_;
    return y_clean_ + c_;
  }

  [[nodiscard]] double y_clean() const { return y_clean_; }
  [[nodiscard]] double corruption() const { return c_; }
  [[nodiscard]] double charge() const { return corruption_.sup_norm(); }
  [[nodiscard]] const CorruptionLedger& ledger() const { return ledger_; }

 private:
  const RunSpec& spec_;
  double noise_std_;
  Rng noise_;
  std::unique_ptr<Adversary> adversary_;
  CorruptionLedger ledger_;
  std::vector<CleanObservation> history_;
  CorruptionFunction corruption_;
  bool committed_ = false;
  std::size_t round_ = 1;
  double y_clean_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

double effective_noise_std(const RunSpec& spec) {
  const double s = spec.noise_std.value_or(kDefaultNoiseFraction * spec.objective.B0);
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("noise_std must be finite and >= 0");
  return s;
}

RunResult run_experiment(const RunSpec& spec) {
  if (!spec.kernel) throw ConfigError("run spec has no kernel");
  if (spec.objective.values.size() != spec.kernel->size()) {
    throw ConfigError("objective length does not match the grid");
  }
  const std::size_t T = spec.policy.params.horizon;
  const std::span<const double> f = spec.objective.values;

  Rng root(spec.seed);
  Rng policy_rng = root.split(streams::kPolicy);
  SimEnvironment env(spec, effective_noise_std(spec), root.split(streams::kNoise));
  auto policy = make_policy(spec.kernel, spec.policy);
  auto* layered = dynamic_cast<LayeredUcb*>(policy.get());
  const bool fast_slow = spec.policy.kind == PolicyKind::FastSlow;

  RunResult result;
  RunDiagnostics& diag = result.diagnostics;
  result.trace.reserve(T);
  std::vector<ReportRow> rows;
  rows.reserve(T);
  std::optional<MaximizerSets> prev_sets;
  if (layered) prev_sets = layered->maximizer_sets();
  if (spec.adversary.budget == 0.0) diag.exhaustion_round = 0;

  bool was_invalid = false;
  double cum = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    std::optional<bool> slow_ok;
    if (spec.track_coverage || fast_slow) {
      const Coverage cov = policy->coverage(f);
      slow_ok = cov.slow;
      if (spec.track_coverage) {
        diag.primary_covered = diag.primary_covered && cov.primary;
        if (cov.slow) diag.slow_covered = diag.slow_covered.value_or(true) && *cov.slow;
      }
    }

    const SelectionPlan plan = policy->plan();
    env.commit(plan);
    const std::size_t entry = policy->draw(plan, policy_rng);
    const PlanEntry& chosen = plan.entries.at(entry);
    const bool no_update = chosen.fallback || chosen.all_sets_empty;
    const std::uint64_t digest_before = (layered && no_update) ? policy->digest() : 0;

    const double y_tilde = env.query(chosen.index);
    const StepOutcome out = policy->observe(plan, entry, y_tilde);

    if (layered) {
      if (no_update && policy->digest() != digest_before) ++diag.fallback_mutations;
      const MaximizerSets& sets = layered->maximizer_sets();
      if (!sets.nested() || !sets.subset_of(*prev_sets)) ++diag.nesting_violations;
      prev_sets = sets;
    }
    if (out.outside_suboptimal_set && slow_ok.value_or(false)) {
      ++diag.fast_rounds_checked;
      if (!*out.outside_suboptimal_set) ++diag.fast_selection_violations;
    }
    if (out.switched) {
      ++diag.switch_count;
      if (!diag.switch_round) diag.switch_round = t;
    }
    if (was_invalid && out.is_valid) diag.switch_permanent = false;
    was_invalid = was_invalid || !out.is_valid;

    const double c = env.corruption();
    if (out.instance == Instance::Slow) diag.slow_observed_corruption += std::abs(c);
    diag.realized_corruption += std::abs(c);
    if (!diag.exhaustion_round && env.ledger().exhausted()) diag.exhaustion_round = t;

    RoundRecord rec;
    rec.t = t;
    rec.instance = out.instance;
    rec.layer = out.layer;
    rec.x_index = out.index;
    rec.y_clean = env.y_clean();
    rec.corruption = c;
    rec.y_tilde = y_tilde;
    rec.instant_regret = spec.objective.gap(out.index);
    cum += rec.instant_regret;
    rec.cum_regret = cum;
    rec.ledger_spent = env.ledger().spent();
    rec.is_valid = out.is_valid;
    rec.mean = out.mean;
    rec.std = out.std;
    rec.beta = out.beta;
    result.trace.push_back(rec);
    rows.push_back({out.index, out.mean, out.std, out.beta});
  }

  const CorruptionLedger& ledger = env.ledger();
  result.ledger_spent = ledger.spent();
  double sum = 0.0;
  for (double ch : ledger.charges()) {
    sum += ch;
  }
  diag.ledger_ok = sum == ledger.spent() && ledger.spent() <= ledger.budget() &&
                   diag.realized_corruption <= sum && ledger.charges().size() == T;

  diag.round_counts = policy->round_counts();
  std::size_t attributed = 0;
  for (std::size_t n : diag.round_counts) attributed += n;
  diag.attribution_ok = attributed == T;
  if (layered) {
    diag.fallback_rounds = layered->fallback_rounds();
    diag.all_empty_events = layered->all_empty_events();
  }

  if (!rows.empty()) {
    result.report = simple_regret_report(rows, spec.policy.params.C.value_or(0.0));
    result.simple_regret = spec.objective.gap(result.report.index);
  }

  if (diag.fast_selection_violations) diag.failures.push_back("fast instance selected a slow-suboptimal point");
  if (diag.nesting_violations) diag.failures.push_back("maximizer sets lost nesting");
  if (diag.fallback_mutations) diag.failures.push_back("fallback round mutated policy state");
  if (!diag.ledger_ok) diag.failures.push_back("ledger conservation failed");
  if (!diag.switch_permanent) diag.failures.push_back("policy became valid again after switching");
  if (diag.switch_count > 1) diag.failures.push_back("switch fired more than once");
  if (!diag.attribution_ok) diag.failures.push_back("round attribution does not sum to T");
  return result;
}

double post_exhaustion_optimal_fraction(const RunResult& result, std::size_t x_star_index) {
  const auto& ex = result.diagnostics.exhaustion_round;
  if (!ex) return 0.0;
  std::size_t window = 0;
  std::size_t hits = 0;
  for (const RoundRecord& r : result.trace) {
    if (r.t <= *ex) continue;
    ++window;
    if (r.x_index == x_star_index) ++hits;
  }
  return window == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(window);
}

std::vector<RunResult> run_parallel(std::size_t count, std::size_t workers,
                                    const std::function<RunResult(std::size_t)>& job) {
  std::vector<RunResult> results(count);
  if (count == 0) return results;
  workers = std::clamp<std::size_t>(workers, 1, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace ctgp
