#include <algorithm>
#include <cmath>
#include <limits>

#include "ctgp/errors.hpp"
#include "ctgp/policies.hpp"

namespace ctgp {

std::size_t num_layers_for(std::size_t horizon) {
  std::size_t layers = 0;
  while ((std::size_t{1} << layers) < horizon) ++layers;
  return std::max<std::size_t>(1, layers);
}

double layer_probability(std::size_t num_layers, std::size_t layer) {
  if (layer < 1 || layer > num_layers) return 0.0;
  if (layer >= 2) return std::ldexp(1.0, -static_cast<int>(layer));
  double rest = 0.0;
  for (std::size_t l = 2; l <= num_layers; ++l) rest += std::ldexp(1.0, -static_cast<int>(l));
  return 1.0 - rest;
}

std::size_t layer_sample(std::size_t num_layers, Rng& rng) {
  if (num_layers < 1) throw ConfigError("layer_sample: need at least one layer");
  if (num_layers == 1) return 1;
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t l = num_layers; l >= 2; --l) {
    cum += std::ldexp(1.0, -static_cast<int>(l));
    if (u < cum) return l;
  }
  return 1;
}

std::size_t robust_layer_index(double C, std::size_t horizon) {
  if (!(C >= 0.0)) throw InputError("robust_layer_index: C must be non-negative");
  const std::size_t top = num_layers_for(horizon);
  std::size_t layer = 1;
  // Smallest layer with 2^layer >= C.
  while (layer < top && std::ldexp(1.0, static_cast<int>(layer)) < C) ++layer;
  return layer;
}

namespace {

const PolicySpec& checked(const PolicySpec& spec) {
  validate(spec);
  if (spec.kind != PolicyKind::LayeredUnknownC) throw ConfigError("LayeredUcb: wrong policy kind");
  return spec;
}

}  // namespace

LayeredUcb::LayeredUcb(GridKernelPtr kernel, const PolicySpec& spec)
    : kernel_(kernel),
      params_(checked(spec).params),
      schedule_(params_.beta, LayeredBeta{params_.horizon}),
      sets_(num_layers_for(params_.horizon), kernel->size()) {
  const std::size_t L = num_layers_for(params_.horizon);
  posts_.reserve(L);
  bars_.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    posts_.emplace_back(kernel_, params_.beta.lambda);
    bars_.emplace_back(kernel_->size());
  }
  selections_.assign(L, 0);
  for (std::size_t l = 1; l <= L; ++l) refresh(l);
}

double LayeredUcb::beta_for(std::size_t layer) const {
  const PosteriorState& post = posts_[layer - 1];
  return schedule_(post.size() + 1, gamma_of(post, params_.gamma_mode));
}

void LayeredUcb::refresh(std::size_t layer) {
  bars_[layer - 1].update(bounds_snapshot(posts_[layer - 1], beta_for(layer), 1.0));
}

SelectionPlan LayeredUcb::plan() const {
  const std::size_t L = num_layers();
  const std::size_t n = kernel_->size();
  std::vector<std::optional<std::size_t>> choice(L + 1);
  const std::vector<char> full(n, 1);

  auto select_in = [&](std::size_t layer, std::span<const char> mask) {
    const PosteriorState& post = posts_[layer - 1];
    const double width = params_.alpha * beta_for(layer);
    std::optional<std::size_t> best;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      const double v = post.mean_at(i) + width * post.std_at(i);
      if (!best || v > best_val) {
        best_val = v;
        best = i;
      }
    }
    return best;
  };

  SelectionPlan plan;
  plan.entries.reserve(L);
  for (std::size_t l = 1; l <= L; ++l) {
    PlanEntry e;
    e.instance = Instance::Layer;
    e.layer = l;
    e.probability = layer_probability(L, l);
    std::size_t acting = l;
    if (sets_.empty(l)) {
      e.fallback = true;
      acting = 0;
      for (std::size_t i = l + 1; i <= L; ++i) {
        if (!sets_.empty(i)) {
          acting = i;
          break;
        }
      }
    }
    if (acting == 0) {
      // Every set at or above l is empty, which cannot happen while the
      // top layer's bounds hold. Play the top layer's unrestricted UCB.
      e.all_sets_empty = true;
      e.acting_layer = L;
      e.index = *select_in(L, full);
    } else {
      e.acting_layer = acting;
      if (!choice[acting]) choice[acting] = select_in(acting, sets_.mask(acting));
      e.index = *choice[acting];
    }
    plan.entries.push_back(e);
  }
  return plan;
}

std::size_t LayeredUcb::draw(const SelectionPlan& plan, Rng& rng) const {
  const std::size_t layer = layer_sample(num_layers(), rng);
  if (plan.entries.size() != num_layers()) throw InternalError("layered draw: plan size mismatch");
  return layer - 1;
}

StepOutcome LayeredUcb::observe(const SelectionPlan& plan, std::size_t entry, double y_tilde) {
  const PlanEntry& e = plan.entries.at(entry);
  const std::size_t acting = e.acting_layer;
  const PosteriorState& post = posts_[acting - 1];

  StepOutcome out;
  out.index = e.index;
  out.instance = Instance::Layer;
  out.layer = acting;
  out.mean = post.mean_at(e.index);
  out.std = post.std_at(e.index);
  out.beta = beta_for(acting);
  out.fallback = e.fallback;
  out.all_sets_empty = e.all_sets_empty;

  ++selections_[acting - 1];
  if (e.fallback || e.all_sets_empty) {
    ++fallback_rounds_;
    if (e.all_sets_empty) ++all_empty_events_;
    return out;
  }

  posts_[acting - 1].append_grid(e.index, y_tilde);
  refresh(acting);
  sets_.update(acting, bars_[acting - 1]);
  return out;
}

Coverage LayeredUcb::coverage(std::span<const double> f) const {
  return {bars_.back().contains(f), std::nullopt};
}

std::uint64_t LayeredUcb::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) { h = (h ^ v) * 1099511628211ULL; };
  for (const auto& p : posts_) mix(p.digest());
  for (const auto& b : bars_) {
    for (double v : b.ucb()) mix(std::hash<double>{}(v));
    for (double v : b.lcb()) mix(std::hash<double>{}(v));
    mix(b.updates());
  }
  for (std::size_t l = 1; l <= sets_.num_layers(); ++l) {
    for (char c : sets_.mask(l)) mix(static_cast<std::uint64_t>(c));
  }
  return h;
}

std::unique_ptr<Policy> LayeredUcb::clone() const { return std::make_unique<LayeredUcb>(*this); }

void LayeredUcb::set_maximizer_sets(MaximizerSets sets) {
  if (sets.num_layers() != num_layers() || sets.grid_size() != kernel_->size()) {
    throw InputError("set_maximizer_sets: shape mismatch");
  }
  sets_ = std::move(sets);
}

}  // namespace ctgp
