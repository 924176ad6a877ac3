#include "ctgp/kernels.hpp"

#include <cmath>
#include <sstream>

#include "ctgp/errors.hpp"

namespace ctgp {

DomainGrid::DomainGrid(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.cols() == 0 || points_.rows() == 0) {
    throw InputError("DomainGrid: grid must contain at least one point of positive dimension");
  }
  if (!points_.allFinite()) {
    throw InputError("DomainGrid: all coordinates must be finite");
  }
  // Pairwise distinctness. Grids are at most a few thousand points.
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < points_.cols(); ++j) {
      if ((points_.col(i).array() == points_.col(j).array()).all()) {
        throw InputError("DomainGrid: points " + std::to_string(i) + " and " + std::to_string(j) +
                         " coincide");
      }
    }
  }
}

DomainGrid DomainGrid::uniform(std::span<const double> lower, std::span<const double> upper,
                               std::size_t resolution) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw InputError("DomainGrid::uniform: bounds must be non-empty and of equal dimension");
  }
  if (resolution == 0) {
    throw InputError("DomainGrid::uniform: resolution must be positive");
  }
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!(upper[k] > lower[k]) && resolution > 1) {
      throw InputError("DomainGrid::uniform: upper bound must exceed lower bound on every axis");
    }
  }
  const std::size_t d = lower.size();
  std::size_t n = 1;
  for (std::size_t k = 0; k < d; ++k) n *= resolution;

  Eigen::MatrixXd pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t rem = j;
    // Last axis varies fastest.
    for (std::size_t k = d; k-- > 0;) {
      const std::size_t step = rem % resolution;
      rem /= resolution;
      const double frac =
          resolution == 1 ? 0.0 : static_cast<double>(step) / static_cast<double>(resolution - 1);
      pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          lower[k] + frac * (upper[k] - lower[k]);
    }
  }
  return DomainGrid(std::move(pts));
}

std::vector<std::size_t> DomainGrid::ball(const PointRef& center, double radius) const {
  if (static_cast<std::size_t>(center.size()) != dim()) {
    throw InputError("DomainGrid::ball: dimension mismatch");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if ((point(i) - center).norm() <= radius) out.push_back(i);
  }
  return out;
}

KernelSpec::KernelSpec(Family family) : family_(family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          if (!(f.scale > 0.0) || !std::isfinite(f.scale)) {
            throw ConfigError("kernel: linear scale must be positive and finite");
          }
        } else {
          if (!(f.lengthscale > 0.0) || !std::isfinite(f.lengthscale)) {
            throw ConfigError("kernel: lengthscale must be positive and finite");
          }
        }
      },
      family_);
}

KernelSpec KernelSpec::squared_exponential(double lengthscale) {
  return KernelSpec(SquaredExponential{lengthscale});
}

KernelSpec KernelSpec::matern(double nu, double lengthscale) {
  MaternNu n{};
  if (nu == 0.5) {
    n = MaternNu::Half;
  } else if (nu == 1.5) {
    n = MaternNu::ThreeHalves;
  } else if (nu == 2.5) {
    n = MaternNu::FiveHalves;
  } else {
    throw ConfigError("kernel: Matern nu must be one of 0.5, 1.5, 2.5");
  }
  return KernelSpec(Matern{n, lengthscale});
}

KernelSpec KernelSpec::linear(double scale) { return KernelSpec(Linear{scale}); }

double KernelSpec::operator()(const PointRef& x, const PointRef& x2) const {
  if (x.size() != x2.size()) {
    throw InputError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(x2.size()) + ")");
  }
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquaredExponential>) {
          const double r2 = (x - x2).squaredNorm();
          return std::exp(-r2 / (2.0 * f.lengthscale * f.lengthscale));
        } else if constexpr (std::is_same_v<T, Matern>) {
          const double r = (x - x2).norm() / f.lengthscale;
          switch (f.nu) {
            case MaternNu::Half:
              return std::exp(-r);
            case MaternNu::ThreeHalves: {
              const double s = std::sqrt(3.0) * r;
              return (1.0 + s) * std::exp(-s);
            }
            case MaternNu::FiveHalves: {
              const double s = std::sqrt(5.0) * r;
              return (1.0 + s + s * s / 3.0) * std::exp(-s);
            }
          }
          return 0.0;
        } else {
          return f.scale * x.dot(x2);
        }
      },
      family_);
}

std::string KernelSpec::name() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SquaredExponential>) {
          return "se";
        } else if constexpr (std::is_same_v<T, Matern>) {
          return "matern";
        } else {
          return "linear";
        }
      },
      family_);
}

double kernel_eval(const KernelSpec& spec, const PointRef& x, const PointRef& x2) {
  if (!x.allFinite() || !x2.allFinite()) throw InputError("kernel_eval: non-finite input");
  return spec(x, x2);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  if (points.cols() == 0) throw InputError("gram_matrix: no points");
  const Eigen::Index t = points.cols();
  Eigen::MatrixXd K(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    K(i, i) = spec(points.col(i), points.col(i));
    for (Eigen::Index j = i + 1; j < t; ++j) {
      const double v = spec(points.col(i), points.col(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

GridKernel::GridKernel(DomainGrid grid, KernelSpec spec)
    : grid_(std::move(grid)), spec_(spec), gram_(gram_matrix(spec_, grid_.points())) {
  const double kmax = gram_.maxCoeff();
  if (kmax > 1.0 + kNormalizationTolerance) {
    std::ostringstream os;
    os << "kernel '" << spec_.name() << "' is not normalized on this grid: max k(x,x') = " << kmax
       << " > 1";
    throw ConfigError(os.str());
  }
}

Eigen::VectorXd GridKernel::column(const PointRef& x) const {
  if (static_cast<std::size_t>(x.size()) != grid_.dim()) {
    throw InputError("GridKernel::column: dimension mismatch");
  }
  Eigen::VectorXd c(static_cast<Eigen::Index>(grid_.size()));
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) = spec_(grid_.point(i), x);
  }
  return c;
}

GridKernelPtr make_grid_kernel(DomainGrid grid, KernelSpec spec) {
  return std::make_shared<const GridKernel>(std::move(grid), spec);
}

}  // namespace ctgp
