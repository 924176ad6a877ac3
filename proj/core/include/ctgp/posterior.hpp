#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ctgp/kernels.hpp"

namespace ctgp {

/// One round's observation: y_corrupted = y_clean + corruption, exactly.
struct Observation {
  Point x;
  double y_clean = 0.0;
  double corruption = 0.0;
  double y_corrupted = 0.0;

  static Observation make(Point x, double y_clean, double corruption) {
    return Observation{std::move(x), y_clean, corruption, y_clean + corruption};
  }
};

struct PosteriorQuery {
  double mean;
  double std;
};

/// GP regression state under a zero-mean prior with N(0, lambda) sampling
/// noise, conditioned on an ordered history of (x_i, y_i) pairs.
///
/// The lower-triangular factor L of (K_t + lambda I) is extended by one row
/// per append. For every grid point g the state also keeps the vector
/// L^{-1} k_t(g), so posterior means and variances over the whole grid are
/// refreshed in O(grid * t) per append instead of being recomputed.
///
/// The observation values are whatever the caller supplies: clean y in the
/// non-corrupted model, corrupted y-tilde otherwise.
class PosteriorState {
 public:
  PosteriorState(GridKernelPtr kernel, double lambda);

  /// Pre-allocate storage for `n` observations.
  void reserve(std::size_t n);

  void append(const PointRef& x, double y_obs);
  /// Append an observation located at grid point `index`.
  void append_grid(std::size_t index, double y_obs);

  [[nodiscard]] PosteriorQuery query(const PointRef& x) const;

  [[nodiscard]] double mean_at(std::size_t i) const { return grid_mean_[i]; }
  [[nodiscard]] double std_at(std::size_t i) const;
  [[nodiscard]] std::span<const double> grid_means() const { return grid_mean_; }
  [[nodiscard]] std::span<const double> grid_variances() const { return grid_var_; }

  /// Realized information gain 1/2 ln det(I_t + K_t / lambda).
  [[nodiscard]] double info_gain() const { return info_gain_; }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] bool empty() const { return n_ == 0; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const GridKernel& grid_kernel() const { return *kernel_; }
  [[nodiscard]] const GridKernelPtr& grid_kernel_ptr() const { return kernel_; }

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] std::span<const double> observations() const { return y_; }
  /// Grid index of each observation, or nullopt for off-grid points.
  [[nodiscard]] std::span<const std::optional<std::size_t>> grid_indices() const {
    return grid_index_;
  }

  /// The t x t factor L with L L^T = K_t + lambda I.
  [[nodiscard]] Eigen::MatrixXd factor() const;

  /// FNV-1a digest over history, factor and cached grid moments.
  [[nodiscard]] std::uint64_t digest() const;

 private:
  void append_impl(const PointRef& x, std::optional<std::size_t> grid_index, double y_obs);
  void grow(std::size_t capacity);

  GridKernelPtr kernel_;
  double lambda_;
  std::size_t n_ = 0;
  std::size_t capacity_ = 0;

  std::vector<Point> points_;
  std::vector<double> y_;
  std::vector<std::optional<std::size_t>> grid_index_;

  Eigen::MatrixXd chol_;   // capacity x capacity, lower triangle of the leading n x n block used
  Eigen::VectorXd whitened_;  // L^{-1} y, first n entries
  Eigen::MatrixXd grid_proj_; // grid x capacity; row g holds L^{-1} k_t(g)

  std::vector<double> grid_mean_;
  std::vector<double> grid_var_;
  double info_gain_ = 0.0;
};

/// Checks |mu(x) - mu_tilde(x)| <= C lambda^{-1/2} sigma(x) at every grid
/// point, with 1e-9 slack. Throws InputError unless both states share the
/// input history, the grid and lambda.
bool mean_shift_bound_check(const PosteriorState& clean, const PosteriorState& corrupted, double C);

inline constexpr double kMeanShiftSlack = 1e-9;

}  // namespace ctgp
