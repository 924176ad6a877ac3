#include "ctgp/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctgp/errors.hpp"

namespace ctgp {

BetaSchedule::BetaSchedule(BetaParams params, Variant variant, double split)
    : params_(params), variant_(variant), split_(split) {
  if (!(params_.delta > 0.0 && params_.delta < 1.0)) {
    throw ConfigError("beta schedule: delta must lie in (0, 1)");
  }
  if (!(params_.lambda > 0.0)) throw ConfigError("beta schedule: lambda must be positive");
  if (!(params_.B >= 0.0) || !(params_.B0 >= 0.0) || !(params_.sigma >= 0.0)) {
    throw ConfigError("beta schedule: B, B0 and sigma must be non-negative");
  }
  if (const auto* layered = std::get_if<LayeredBeta>(&variant_)) {
    if (layered->horizon < 1) throw ConfigError("beta schedule: horizon must be at least 1");
    split_ = 4.0 * (1.0 + std::log2(static_cast<double>(layered->horizon)));
  }
  if (const auto* known = std::get_if<KnownCBeta>(&variant_)) {
    if (!(known->C >= 0.0)) throw ConfigError("beta schedule: C must be non-negative");
  }
  if (!(split_ >= 1.0)) throw ConfigError("beta schedule: delta split must be >= 1");
}

double BetaSchedule::operator()(std::size_t t, double gamma_hat) const {
  if (t < 1) throw InputError("beta schedule: t must be >= 1");
  if (!(gamma_hat >= 0.0)) throw InputError("beta schedule: gamma must be non-negative");
  const double inv_sqrt_lambda = 1.0 / std::sqrt(params_.lambda);
  const double log_term = std::log(1.0 / effective_delta());
  const double base =
      params_.B + params_.sigma * inv_sqrt_lambda * std::sqrt(2.0 * (gamma_hat + log_term));
  const double extra = std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StandardBeta>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, KnownCBeta>) {
          return inv_sqrt_lambda * v.C;
        } else {
          return inv_sqrt_lambda * (3.0 + params_.B0 * log_term);
        }
      },
      variant_);
  return base + extra;
}

double beta_eval(const BetaSchedule& schedule, std::size_t t, double gamma_hat) {
  return schedule(t, gamma_hat);
}

BoundsSnapshot bounds_snapshot(const PosteriorState& post, double beta, double alpha) {
  if (!(alpha >= 1.0)) throw ConfigError("bounds_snapshot: alpha must be >= 1");
  if (!(beta > 0.0)) throw ConfigError("bounds_snapshot: beta must be positive");
  const std::size_t n = post.grid_kernel().size();
  BoundsSnapshot s;
  s.ucb.resize(n);
  s.lcb.resize(n);
  const double width = alpha * beta;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = post.mean_at(i);
    const double w = width * post.std_at(i);
    s.ucb[i] = mu + w;
    s.lcb[i] = mu - w;
  }
  return s;
}

IntersectedBounds::IntersectedBounds(std::size_t grid_size)
    : ucb_(grid_size, std::numeric_limits<double>::infinity()),
      lcb_(grid_size, -std::numeric_limits<double>::infinity()) {}

void IntersectedBounds::update(const BoundsSnapshot& snapshot) {
  if (snapshot.ucb.size() != ucb_.size() || snapshot.lcb.size() != lcb_.size()) {
    throw InputError("intersect_update: snapshot length " + std::to_string(snapshot.ucb.size()) +
                     " does not match grid size " + std::to_string(ucb_.size()));
  }
  for (std::size_t i = 0; i < ucb_.size(); ++i) {
    ucb_[i] = std::min(ucb_[i], snapshot.ucb[i]);
    lcb_[i] = std::max(lcb_[i], snapshot.lcb[i]);
  }
  ++updates_;
}

bool IntersectedBounds::contains(std::span<const double> f) const {
  if (f.size() != ucb_.size()) throw InputError("IntersectedBounds::contains: size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > ucb_[i] || f[i] < lcb_[i]) return false;
  }
  return true;
}

bool switch_condition(const IntersectedBounds& fast, const IntersectedBounds& slow) {
  if (fast.size() != slow.size()) throw InputError("switch_condition: grid size mismatch");
  const auto u = fast.ucb();
  const auto l = slow.lcb();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] - l[i] < 0.0) return true;
  }
  return false;
}

namespace {
double max_lcb(const IntersectedBounds& b) {
  const auto l = b.lcb();
  return *std::max_element(l.begin(), l.end());
}
}  // namespace

std::vector<std::size_t> suboptimal_set(const IntersectedBounds& slow) {
  std::vector<std::size_t> out;
  if (slow.size() == 0) return out;
  const double best_lcb = max_lcb(slow);
  const auto u = slow.ucb();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < best_lcb) out.push_back(i);
  }
  return out;
}

bool is_suboptimal(const IntersectedBounds& slow, std::size_t index) {
  return slow.ucb()[index] < max_lcb(slow);
}

MaximizerSets::MaximizerSets(std::size_t num_layers, std::size_t grid_size)
    : sets_(num_layers, std::vector<char>(grid_size, 1)), grid_size_(grid_size) {
  if (num_layers < 1) throw ConfigError("MaximizerSets: need at least one layer");
}

void MaximizerSets::update(std::size_t layer, const IntersectedBounds& bounds) {
  if (layer < 1 || layer > sets_.size()) throw InputError("MaximizerSets::update: bad layer");
  if (bounds.size() != grid_size_) throw InputError("MaximizerSets::update: grid size mismatch");
  const double best_lcb = max_lcb(bounds);
  const auto u = bounds.ucb();
  auto& mine = sets_[layer - 1];
  for (std::size_t i = 0; i < grid_size_; ++i) {
    mine[i] = static_cast<char>(mine[i] && u[i] >= best_lcb);
  }
  for (std::size_t below = 0; below + 1 < layer; ++below) {
    auto& s = sets_[below];
    for (std::size_t i = 0; i < grid_size_; ++i) s[i] = static_cast<char>(s[i] && mine[i]);
  }
}

bool MaximizerSets::contains(std::size_t layer, std::size_t index) const {
  return sets_.at(layer - 1).at(index) != 0;
}

bool MaximizerSets::empty(std::size_t layer) const { return count(layer) == 0; }

std::size_t MaximizerSets::count(std::size_t layer) const {
  const auto& s = sets_.at(layer - 1);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), char{1}));
}

std::span<const char> MaximizerSets::mask(std::size_t layer) const { return sets_.at(layer - 1); }

void MaximizerSets::assign(std::size_t layer, std::vector<char> mask) {
  if (mask.size() != grid_size_) throw InputError("MaximizerSets::assign: size mismatch");
  for (char& c : mask) c = static_cast<char>(c != 0);
  sets_.at(layer - 1) = std::move(mask);
}

bool MaximizerSets::nested() const {
  for (std::size_t l = 0; l + 1 < sets_.size(); ++l) {
    for (std::size_t i = 0; i < grid_size_; ++i) {
      if (sets_[l][i] && !sets_[l + 1][i]) return false;
    }
  }
  return true;
}

bool MaximizerSets::subset_of(const MaximizerSets& earlier) const {
  if (earlier.sets_.size() != sets_.size() || earlier.grid_size_ != grid_size_) return false;
  for (std::size_t l = 0; l < sets_.size(); ++l) {
    for (std::size_t i = 0; i < grid_size_; ++i) {
      if (sets_[l][i] && !earlier.sets_[l][i]) return false;
    }
  }
  return true;
}

std::optional<std::size_t> elimination_time(double delta0,
                                            const std::function<double(std::size_t)>& beta,
                                            const std::function<double(std::size_t)>& gamma,
                                            double alpha, std::size_t horizon) {
  if (!(delta0 > 0.0)) throw InputError("elimination_time: delta0 must be positive");
  if (!(alpha >= 1.0)) throw InputError("elimination_time: alpha must be >= 1");
  const double target = delta0 / 10.0;
  for (std::size_t tau = 1; tau <= horizon; ++tau) {
    const double b = beta(tau);
    const double lhs =
        std::sqrt(16.0 * alpha * alpha * b * b * gamma(tau) / static_cast<double>(tau));
    if (lhs <= target) return tau;
  }
  return std::nullopt;
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw InputError("argmax over empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::optional<std::size_t> argmax_lowest(std::span<const double> values,
                                         std::span<const char> mask) {
  if (mask.size() != values.size()) throw InputError("argmax: mask size mismatch");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    if (!best || values[i] > values[*best]) best = i;
  }
  return best;
}

}  // namespace ctgp
