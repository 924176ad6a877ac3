#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctgp::cli {

struct PlotReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> missing;  // series listed in the summary but absent on disk
};

/// Renders regret.svg (median cumulative regret per policy with its
/// interquartile band) and, for 1-D grids, objective.svg (f with the points
/// each policy sampled on the first seed). Throws InputError when `dir`
/// holds no batch summary.
PlotReport emit_plot(const std::filesystem::path& dir);

}  // namespace ctgp::cli
