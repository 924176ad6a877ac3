#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ctgp {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Finite, ordered discretization of the compact domain. Points are stored
/// as the columns of a d x n matrix; every algorithm addresses them by index.
class DomainGrid {
 public:
  explicit DomainGrid(Eigen::MatrixXd points);

  /// Tensor grid with `resolution` evenly spaced values per axis, endpoints
  /// included. For d = 1 this is the usual linspace(lower, upper, resolution).
  static DomainGrid uniform(std::span<const double> lower, std::span<const double> upper,
                            std::size_t resolution);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(points_.rows()); }
  [[nodiscard]] auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  [[nodiscard]] const Eigen::MatrixXd& points() const { return points_; }

  /// Indices whose Euclidean distance to `center` is at most `radius`.
  [[nodiscard]] std::vector<std::size_t> ball(const PointRef& center, double radius) const;

 private:
  Eigen::MatrixXd points_;
};

struct SquaredExponential {
  double lengthscale;
  bool operator==(const SquaredExponential&) const = default;
};

enum class MaternNu { Half, ThreeHalves, FiveHalves };

struct Matern {
  MaternNu nu;
  double lengthscale;
  bool operator==(const Matern&) const = default;
};

struct Linear {
  double scale;
  bool operator==(const Linear&) const = default;
};

/// Kernel family plus hyperparameters. Stationary families satisfy
/// k(x, x) = 1; the linear family is normalized by choosing its scale.
class KernelSpec {
 public:
  using Family = std::variant<SquaredExponential, Matern, Linear>;

  explicit KernelSpec(Family family);

  static KernelSpec squared_exponential(double lengthscale);
  /// `nu` must be one of 0.5, 1.5, 2.5.
  static KernelSpec matern(double nu, double lengthscale);
  static KernelSpec linear(double scale);

  [[nodiscard]] double operator()(const PointRef& x, const PointRef& x2) const;
  [[nodiscard]] const Family& family() const { return family_; }
  [[nodiscard]] std::string name() const;

  bool operator==(const KernelSpec&) const = default;

 private:
  Family family_;
};

double kernel_eval(const KernelSpec& spec, const PointRef& x, const PointRef& x2);

/// Gram matrix over the columns of `points` (d x t).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points);

inline constexpr double kGramJitter = 1e-10;
inline constexpr double kNormalizationTolerance = 1e-12;

/// A kernel bound to a grid, with the grid Gram matrix precomputed.
/// Construction checks the normalization k(x, x') <= 1 over all grid pairs.
/// Immutable; shared between posteriors and across runs.
class GridKernel {
 public:
  GridKernel(DomainGrid grid, KernelSpec spec);

  [[nodiscard]] const DomainGrid& grid() const { return grid_; }
  [[nodiscard]] const KernelSpec& kernel() const { return spec_; }
  [[nodiscard]] const Eigen::MatrixXd& gram() const { return gram_; }
  [[nodiscard]] std::size_t size() const { return grid_.size(); }

  /// Vector [k(g_i, x)]_i over grid points g_i.
  [[nodiscard]] Eigen::VectorXd column(const PointRef& x) const;

 private:
  DomainGrid grid_;
  KernelSpec spec_;
  Eigen::MatrixXd gram_;
};

using GridKernelPtr = std::shared_ptr<const GridKernel>;

GridKernelPtr make_grid_kernel(DomainGrid grid, KernelSpec spec);

}  // namespace ctgp
