#pragma once

#include <vector>

namespace ctgp::cli {

/// Linear interpolation between order statistics at h = (n - 1) q:
/// v[lo] + (h - lo) (v[lo + 1] - v[lo]). Throws InputError on empty input.
double quantile(std::vector<double> values, double q);
inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace ctgp::cli
