#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "ctgp/errors.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {
namespace {

GridKernelPtr kernel(std::size_t n = 20) {
  return make_grid_kernel(DomainGrid::uniform(std::vector<double>{0}, std::vector<double>{1}, n),
                          KernelSpec::squared_exponential(0.2));
}

PolicySpec spec(PolicyKind kind, std::optional<double> C, std::size_t T = 50) {
  PolicySpec s;
  s.kind = kind;
  s.params.C = C;
  s.params.horizon = T;
  s.params.beta.sigma = 0.05;
  return s;
}

// Deterministic sinusoid plus the round index as a tie breaker.
class ScriptedEnv final : public Environment {
 public:
  std::vector<std::string> calls;
  void commit(const SelectionPlan&) override { calls.push_back("commit"); }
  double query(std::size_t i) override {
    calls.push_back("query");
    return std::sin(3.0 * static_cast<double>(i) / 20.0);
  }
};

TEST(Policies, LabelsRoundTrip) {
  for (auto k : {PolicyKind::VanillaUcb, PolicyKind::KnownC, PolicyKind::FastSlow, PolicyKind::LayeredUnknownC}) {
    EXPECT_EQ(parse_policy_kind(policy_label(k)), k);
  }
  EXPECT_FALSE(parse_policy_kind("ucb").has_value());
  EXPECT_EQ(instance_label(Instance::Layer, 3), "L3");
  EXPECT_EQ(instance_label(Instance::Slow), "S");
}

TEST(Policies, ValidateEnforcesCompatibility) {
  EXPECT_THROW(validate(spec(PolicyKind::KnownC, std::nullopt)), ConfigError);
  EXPECT_THROW(validate(spec(PolicyKind::FastSlow, std::nullopt)), ConfigError);
  EXPECT_THROW(validate(spec(PolicyKind::LayeredUnknownC, 2.0)), ConfigError);
  EXPECT_THROW(validate(spec(PolicyKind::KnownC, -1.0)), ConfigError);
  auto s = spec(PolicyKind::VanillaUcb, std::nullopt);
  s.params.alpha = 0.5;
  EXPECT_THROW(validate(s), ConfigError);
  s = spec(PolicyKind::VanillaUcb, std::nullopt, 0);
  EXPECT_THROW(validate(s), ConfigError);
  EXPECT_NO_THROW(validate(spec(PolicyKind::LayeredUnknownC, std::nullopt)));
}

TEST(Policies, StepCommitsBeforeQuery) {
  auto p = make_policy(kernel(), spec(PolicyKind::FastSlow, 3.0));
  ScriptedEnv env;
  Rng rng(1);
  for (int t = 0; t < 5; ++t) p->step(env, rng);
  ASSERT_EQ(env.calls.size(), 10u);
  for (std::size_t i = 0; i < env.calls.size(); i += 2) {
    EXPECT_EQ(env.calls[i], "commit");
    EXPECT_EQ(env.calls[i + 1], "query");
  }
  EXPECT_EQ(p->rounds(), 5u);
}

TEST(Policies, VanillaSelectsUcbArgmax) {
  auto gk = kernel();
  PosteriorState post(gk, 1.0);
  post.append_grid(3, 1.0);
  post.append_grid(15, -1.0);
  const double beta = 0.7;
  std::size_t best = 0;
  for (std::size_t i = 1; i < gk->size(); ++i) {
    if (post.mean_at(i) + beta * post.std_at(i) > post.mean_at(best) + beta * post.std_at(best)) best = i;
  }
  EXPECT_EQ(vanilla_ucb_select(post, beta), best);
}

TEST(Policies, KnownCWithZeroBudgetReplaysVanilla) {
  auto gk = kernel();
  auto a = make_policy(gk, spec(PolicyKind::VanillaUcb, std::nullopt));
  auto b = make_policy(gk, spec(PolicyKind::KnownC, 0.0));
  ScriptedEnv env;
  Rng ra(3), rb(3);
  for (int t = 0; t < 40; ++t) EXPECT_EQ(a->step(env, ra).index, b->step(env, rb).index) << t;
}

TEST(Policies, FastSlowWithSmallCAlwaysPlaysSlow) {
  for (double C : {0.0, 0.5, 1.0}) {
    FastSlowUcb p(kernel(), spec(PolicyKind::FastSlow, C));
    EXPECT_EQ(p.slow_probability(), 1.0);
    ScriptedEnv env;
    Rng rng(5);
    for (int t = 0; t < 30; ++t) EXPECT_EQ(p.step(env, rng).instance, Instance::Slow);
    EXPECT_EQ(p.round_counts(), (std::vector<std::size_t>{0, 30, 0}));
  }
}

TEST(Policies, FastSlowPlanPublishesBothInstances) {
  FastSlowUcb p(kernel(), spec(PolicyKind::FastSlow, 4.0));
  const auto plan = p.plan();
  ASSERT_EQ(plan.entries.size(), 2u);
  EXPECT_EQ(plan.entries[FastSlowUcb::kSlowEntry].instance, Instance::Slow);
  EXPECT_DOUBLE_EQ(plan.entries[FastSlowUcb::kSlowEntry].probability, 0.25);
  EXPECT_DOUBLE_EQ(plan.entries[FastSlowUcb::kFastEntry].probability, 0.75);
}

TEST(Policies, FastSlowObservationUpdatesOnlyActingInstance) {
  FastSlowUcb p(kernel(), spec(PolicyKind::FastSlow, 4.0));
  const auto plan = p.plan();
  p.observe(plan, FastSlowUcb::kFastEntry, 0.3);
  EXPECT_EQ(p.fast_posterior().size(), 1u);
  EXPECT_EQ(p.slow_posterior().size(), 0u);
  p.observe(p.plan(), FastSlowUcb::kSlowEntry, 0.3);
  EXPECT_EQ(p.slow_posterior().size(), 1u);
  EXPECT_EQ(p.arrivals().size(), 2u);
}

TEST(Policies, FastSlowSwitchIsPermanentAndPoolsHistory) {
  auto s = spec(PolicyKind::FastSlow, 10.0, 400);
  s.params.beta.B = 0.1;
  FastSlowUcb p(kernel(), s);
  // S sees +1 everywhere it plays, F sees -3: F's bounds fall below S's.
  std::size_t t = 0;
  while (p.is_valid() && t < 400) {
    const auto plan = p.plan();
    const std::size_t entry = (t % 3 == 0) ? FastSlowUcb::kSlowEntry : FastSlowUcb::kFastEntry;
    const auto out = p.observe(plan, entry, entry == FastSlowUcb::kSlowEntry ? 1.0 : -3.0);
    ++t;
    if (out.switched) EXPECT_FALSE(out.is_valid);
  }
  ASSERT_FALSE(p.is_valid());
  ASSERT_NE(p.pooled(), nullptr);
  EXPECT_EQ(p.pooled()->posterior().size(), t);
  for (int k = 0; k < 10; ++k) {
    const auto plan = p.plan();
    ASSERT_EQ(plan.entries.size(), 1u);
    EXPECT_EQ(plan.entries[0].instance, Instance::Pooled);
    const auto out = p.observe(plan, 0, 0.0);
    EXPECT_FALSE(out.is_valid);
    EXPECT_FALSE(out.switched);
  }
  const auto counts = p.round_counts();
  EXPECT_EQ(counts[0] + counts[1] + counts[2], t + 10);
}

TEST(Policies, FastSelectionAvoidsSlowSuboptimalSetWhenSlowCovers) {
  FastSlowUcb p(kernel(), spec(PolicyKind::FastSlow, 5.0, 200));
  ScriptedEnv env;
  Rng rng(9);
  for (int t = 0; t < 200 && p.is_valid(); ++t) {
    const auto out = p.step(env, rng);
    if (out.outside_suboptimal_set) EXPECT_TRUE(*out.outside_suboptimal_set);
  }
}

TEST(Layers, CountAndProbabilities) {
  EXPECT_EQ(num_layers_for(1), 1u);
  EXPECT_EQ(num_layers_for(2), 1u);
  EXPECT_EQ(num_layers_for(8), 3u);
  EXPECT_EQ(num_layers_for(9), 4u);
  EXPECT_DOUBLE_EQ(layer_probability(3, 1), 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(layer_probability(3, 2), 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(layer_probability(3, 3), 1.0 / 8.0);
  for (std::size_t L = 1; L < 12; ++L) {
    double s = 0;
    for (std::size_t l = 1; l <= L; ++l) s += layer_probability(L, l);
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(Layers, RobustLayerIndex) {
  EXPECT_EQ(robust_layer_index(0.5, 64), 1u);
  EXPECT_EQ(robust_layer_index(2.0, 64), 1u);
  EXPECT_EQ(robust_layer_index(3.0, 64), 2u);
  EXPECT_EQ(robust_layer_index(4.0, 64), 2u);
  EXPECT_EQ(robust_layer_index(5.0, 64), 3u);
  EXPECT_EQ(robust_layer_index(1e6, 64), 6u);
}

TEST(Layered, TwoRoundHorizonHasOneLayer) {
  LayeredUcb p(kernel(), spec(PolicyKind::LayeredUnknownC, std::nullopt, 2));
  EXPECT_EQ(p.num_layers(), 1u);
  EXPECT_EQ(p.plan().entries.size(), 1u);
}

TEST(Layered, FallbackRoundIsMutationFree) {
  LayeredUcb p(kernel(), spec(PolicyKind::LayeredUnknownC, std::nullopt, 8));
  MaximizerSets sets(3, 20);
  sets.assign(1, std::vector<char>(20, 0));
  std::vector<char> upper(20, 0);
  upper[4] = upper[5] = 1;
  sets.assign(2, upper);
  sets.assign(3, upper);
  p.set_maximizer_sets(sets);
  const auto plan = p.plan();
  ASSERT_TRUE(plan.entries[0].fallback);
  EXPECT_EQ(plan.entries[0].acting_layer, 2u);
  EXPECT_TRUE(plan.entries[0].index == 4 || plan.entries[0].index == 5);
  const auto before = p.digest();
  const auto out = p.observe(plan, 0, 123.0);
  EXPECT_EQ(p.digest(), before);
  EXPECT_TRUE(out.fallback);
  EXPECT_EQ(p.fallback_rounds(), 1u);
  EXPECT_EQ(p.round_counts()[1], 1u);
}

TEST(Layered, AllEmptySetsIsADiagnosticNotACrash) {
  LayeredUcb p(kernel(), spec(PolicyKind::LayeredUnknownC, std::nullopt, 8));
  MaximizerSets sets(3, 20);
  for (std::size_t l = 1; l <= 3; ++l) sets.assign(l, std::vector<char>(20, 0));
  p.set_maximizer_sets(sets);
  const auto plan = p.plan();
  for (const auto& e : plan.entries) EXPECT_TRUE(e.all_sets_empty);
  const auto before = p.digest();
  p.observe(plan, 2, 0.0);
  EXPECT_EQ(p.digest(), before);
  EXPECT_EQ(p.all_empty_events(), 1u);
}

TEST(Layered, RunKeepsSetsNested) {
  LayeredUcb p(kernel(), spec(PolicyKind::LayeredUnknownC, std::nullopt, 64));
  ScriptedEnv env;
  Rng rng(13);
  MaximizerSets prev = p.maximizer_sets();
  for (int t = 0; t < 64; ++t) {
    p.step(env, rng);
    ASSERT_TRUE(p.maximizer_sets().nested());
    ASSERT_TRUE(p.maximizer_sets().subset_of(prev));
    prev = p.maximizer_sets();
  }
  std::size_t total = 0;
  for (auto n : p.round_counts()) total += n;
  EXPECT_EQ(total, 64u);
}

TEST(Report, MaximizesPessimisticScore) {
  const std::vector<ReportRow> rows{{4, 1.0, 0.5, 1.0}, {7, 0.9, 0.1, 1.0}, {2, 0.9, 0.1, 1.0}};
  // Scores with C = 1: 1 - 2*0.5 = 0, 0.9 - 0.2 = 0.7 (twice, earliest wins).
  const auto r = simple_regret_report(rows, 1.0);
  EXPECT_EQ(r.index, 7u);
  EXPECT_EQ(r.t_star, 2u);
  EXPECT_THROW(simple_regret_report(std::vector<ReportRow>{}, 0.0), InputError);
}

}  // namespace
}  // namespace ctgp
