#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctgp/errors.hpp"
#include "ctgp/simulator.hpp"

namespace ctgp {
namespace {

void finalize(Objective& obj) {
  if (obj.values.empty()) throw InputError("objective has no values");
  obj.x_star_index = argmax_lowest(obj.values);
  obj.f_star = obj.values[obj.x_star_index];
  double range = 0.0;
  for (double v : obj.values) {
    if (!std::isfinite(v)) throw InputError("objective value is not finite");
    range = std::max(range, std::abs(v));
  }
  obj.B0 = range;
}

// Smallest B0 accepted, so that a zero objective still has a positive range.
constexpr double kMinRange = 1e-12;

}  // namespace

double expansion_norm_squared(const GridKernel& kernel, std::span<const std::size_t> centers,
                              std::span<const double> weights) {
  if (centers.size() != weights.size()) throw InputError("expansion: centers/weights length mismatch");
  const auto& K = kernel.gram();
  double q = 0.0;
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = 0; b < centers.size(); ++b) {
      q += weights[a] * weights[b] *
           K(static_cast<Eigen::Index>(centers[a]), static_cast<Eigen::Index>(centers[b]));
    }
  }
  return q;
}

Objective Objective::from_expansion(const GridKernel& kernel, std::vector<std::size_t> centers,
                                    std::vector<double> weights) {
  if (centers.empty()) throw InputError("expansion needs at least one center");
  for (std::size_t c : centers) {
    if (c >= kernel.size()) throw InputError("expansion center outside the grid");
  }
  Objective obj;
  const double q = expansion_norm_squared(kernel, centers, weights);
  obj.B = std::sqrt(std::max(0.0, q));
  obj.values.assign(kernel.size(), 0.0);
  const auto& K = kernel.gram();
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      v += weights[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(centers[j]));
    }
    obj.values[i] = v;
  }
  obj.centers = std::move(centers);
  obj.weights = std::move(weights);
  finalize(obj);
  obj.B0 = std::max(obj.B0, kMinRange);
  return obj;
}

Objective Objective::from_values(std::vector<double> values, double B) {
  if (!(B > 0.0)) throw InputError("objective norm bound B must be > 0");
  Objective obj;
  obj.values = std::move(values);
  obj.B = B;
  finalize(obj);
  obj.B0 = std::max(obj.B0, kMinRange);
  return obj;
}

Objective sample_rkhs_objective(const GridKernel& kernel, double B, Rng& rng, std::size_t num_centers) {
  if (!(B > 0.0) || !std::isfinite(B)) throw InputError("sample_rkhs_objective: B must be > 0");
  const std::size_t n = kernel.size();
  const std::size_t m = std::clamp<std::size_t>(num_centers, 1, n);
  std::vector<std::size_t> perm(n);
  for (;;) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
      std::swap(perm[i], perm[std::min(j, n - 1)]);
    }
    std::vector<std::size_t> centers(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<double> weights(m);
    for (double& w : weights) w = rng.normal(0.0, 1.0);
    const double q = expansion_norm_squared(kernel, centers, weights);
    if (!(q > 1e-12)) continue;
    const double scale = B / std::sqrt(q);
    for (double& w : weights) w *= scale;
    Objective obj = Objective::from_expansion(kernel, std::move(centers), std::move(weights));
    obj.B = B;
    return obj;
  }
}

Objective two_peak_objective(const GridKernel& kernel, double local_height) {
  const auto& grid = kernel.grid();
  if (grid.dim() != 1) throw InputError("two_peak_objective needs a 1-D grid");
  auto nearest = [&](double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(grid.point(i)(0) - x) < std::abs(grid.point(best)(0) - x)) best = i;
    }
    return best;
  };
  const std::size_t a = nearest(0.25);
  const std::size_t b = nearest(0.75);
  if (a == b) throw InputError("two_peak_objective: grid too coarse");
  return Objective::from_expansion(kernel, {a, b}, {1.0, local_height});
}

}  // namespace ctgp
