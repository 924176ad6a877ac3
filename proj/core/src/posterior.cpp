#include "ctgp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ctgp/errors.hpp"

namespace ctgp {

PosteriorState::PosteriorState(GridKernelPtr kernel, double lambda)
    : kernel_(std::move(kernel)), lambda_(lambda) {
  if (!kernel_) throw InputError("PosteriorState: null kernel");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw ConfigError("PosteriorState: lambda must be positive and finite");
  }
  const std::size_t g = kernel_->size();
  grid_mean_.assign(g, 0.0);
  grid_var_.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    grid_var_[i] = kernel_->gram()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  }
}

void PosteriorState::reserve(std::size_t n) {
  if (n > capacity_) grow(n);
}

void PosteriorState::grow(std::size_t capacity) {
  const auto cap = static_cast<Eigen::Index>(capacity);
  const auto n = static_cast<Eigen::Index>(n_);
  const auto g = static_cast<Eigen::Index>(kernel_->size());

  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(cap, cap);
  Eigen::VectorXd whitened = Eigen::VectorXd::Zero(cap);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(g, cap);
  if (n > 0) {
    chol.topLeftCorner(n, n) = chol_.topLeftCorner(n, n);
    whitened.head(n) = whitened_.head(n);
    proj.leftCols(n) = grid_proj_.leftCols(n);
  }
  chol_ = std::move(chol);
  whitened_ = std::move(whitened);
  grid_proj_ = std::move(proj);
  capacity_ = capacity;
}

void PosteriorState::append(const PointRef& x, double y_obs) {
  if (static_cast<std::size_t>(x.size()) != kernel_->grid().dim()) {
    throw InputError("posterior append: dimension mismatch");
  }
  append_impl(x, std::nullopt, y_obs);
}

void PosteriorState::append_grid(std::size_t index, double y_obs) {
  if (index >= kernel_->size()) throw InputError("posterior append: grid index out of range");
  append_impl(kernel_->grid().point(index), index, y_obs);
}

void PosteriorState::append_impl(const PointRef& x, std::optional<std::size_t> grid_index,
                                 double y_obs) {
  if (!x.allFinite() || !std::isfinite(y_obs)) {
    throw InputError("posterior append: non-finite input");
  }
  if (n_ == capacity_) grow(std::max<std::size_t>(16, 2 * capacity_));

  const auto n = static_cast<Eigen::Index>(n_);
  const KernelSpec& k = kernel_->kernel();

  // z = L^{-1} k_t(x). For grid points this is already cached.
  Eigen::VectorXd z(n);
  if (grid_index) {
    z = grid_proj_.row(static_cast<Eigen::Index>(*grid_index)).head(n).transpose();
  } else if (n > 0) {
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = k(points_[static_cast<std::size_t>(i)], x);
    z = chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>().solve(b);
  }

  const double kxx = k(x, x);
  const double prior_var = std::max(0.0, kxx - z.squaredNorm());
  const double d2 = prior_var + lambda_;
  const double d = std::sqrt(d2);

  if (n > 0) chol_.row(n).head(n) = z.transpose();
  chol_(n, n) = d;
  const double w_new = (y_obs - (n > 0 ? z.dot(whitened_.head(n)) : 0.0)) / d;
  whitened_(n) = w_new;

  Eigen::VectorXd col = grid_index ? Eigen::VectorXd(kernel_->gram().col(
                                         static_cast<Eigen::Index>(*grid_index)))
                                   : kernel_->column(x);
  if (n > 0) col.noalias() -= grid_proj_.leftCols(n) * z;
  col /= d;
  grid_proj_.col(n) = col;

  for (std::size_t i = 0; i < grid_mean_.size(); ++i) {
    const double v = col(static_cast<Eigen::Index>(i));
    grid_mean_[i] += v * w_new;
    grid_var_[i] = std::max(0.0, grid_var_[i] - v * v);
  }

  info_gain_ += 0.5 * std::log(d2 / lambda_);

  points_.emplace_back(x);
  y_.push_back(y_obs);
  grid_index_.push_back(grid_index);
  ++n_;
}

double PosteriorState::std_at(std::size_t i) const { return std::sqrt(grid_var_[i]); }

PosteriorQuery PosteriorState::query(const PointRef& x) const {
  if (static_cast<std::size_t>(x.size()) != kernel_->grid().dim()) {
    throw InputError("posterior query: dimension mismatch");
  }
  const KernelSpec& k = kernel_->kernel();
  const double kxx = k(x, x);
  if (n_ == 0) return {0.0, std::sqrt(std::max(0.0, kxx))};
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = k(points_[static_cast<std::size_t>(i)], x);
  const Eigen::VectorXd z = chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>().solve(b);
  const double mean = z.dot(whitened_.head(n));
  const double var = std::clamp(kxx - z.squaredNorm(), 0.0, std::max(0.0, kxx));
  return {mean, std::sqrt(var)};
}

Eigen::MatrixXd PosteriorState::factor() const {
  const auto n = static_cast<Eigen::Index>(n_);
  return chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>();
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
};

}  // namespace

std::uint64_t PosteriorState::digest() const {
  Fnv1a f;
  f.u64(n_);
  f.f64(lambda_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (Eigen::Index j = 0; j < points_[i].size(); ++j) f.f64(points_[i](j));
    f.f64(y_[i]);
  }
  const auto n = static_cast<Eigen::Index>(n_);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) f.f64(chol_(i, j));
  }
  for (double v : grid_mean_) f.f64(v);
  for (double v : grid_var_) f.f64(v);
  f.f64(info_gain_);
  return f.h;
}

bool mean_shift_bound_check(const PosteriorState& clean, const PosteriorState& corrupted,
                            double C) {
  if (&clean.grid_kernel() != &corrupted.grid_kernel() &&
      !(clean.grid_kernel().grid().points() == corrupted.grid_kernel().grid().points())) {
    throw InputError("mean_shift_bound_check: states use different grids");
  }
  if (clean.lambda() != corrupted.lambda()) {
    throw InputError("mean_shift_bound_check: lambda differs between states");
  }
  if (clean.size() != corrupted.size()) {
    throw InputError("mean_shift_bound_check: history lengths differ");
  }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!(clean.points()[i].array() == corrupted.points()[i].array()).all()) {
      throw InputError("mean_shift_bound_check: input histories differ at position " +
                       std::to_string(i));
    }
  }
  if (!(C >= 0.0)) throw InputError("mean_shift_bound_check: C must be non-negative");

  const double scale = C / std::sqrt(clean.lambda());
  for (std::size_t g = 0; g < clean.grid_kernel().size(); ++g) {
    const double shift = std::abs(clean.mean_at(g) - corrupted.mean_at(g));
    if (shift > scale * clean.std_at(g) + kMeanShiftSlack) return false;
  }
  return true;
}

}  // namespace ctgp
