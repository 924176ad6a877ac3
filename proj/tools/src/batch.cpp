#include "ctgp_cli/batch.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "ctgp/errors.hpp"
#include "ctgp_cli/stats.hpp"
#include "ctgp_cli/trace_csv.hpp"

namespace ctgp::cli {
namespace fs = std::filesystem;

std::size_t BatchResult::failed_runs() const {
  std::size_t n = 0;
  for (const auto& p : policies) {
    for (const auto& r : p.runs) n += r.diagnostics.passed() ? 0 : 1;
  }
  return n;
}

BatchResult execute_batch(const ExperimentConfig& config, std::size_t workers) {
  if (auto errors = validate_config(config); !errors.empty()) throw ConfigError(errors.front());
  BatchResult batch;
  batch.config = config;
  batch.kernel = build_grid_kernel(config);
  for (std::uint64_t seed : config.seeds) batch.objectives.push_back(build_objective(config, *batch.kernel, seed));

  std::map<std::string, std::size_t> seen;
  for (const auto& entry : config.policies) ++seen[std::string(policy_label(entry.kind))];
  std::map<std::string, std::size_t> used;
  for (const auto& entry : config.policies) {
    std::string label(policy_label(entry.kind));
    if (seen[label] > 1) label += "_" + std::to_string(++used[label]);
    batch.policies.push_back({entry, label, {}});
  }

  const std::size_t S = config.seeds.size();
  const std::size_t jobs = S * config.policies.size();
  auto results = run_parallel(jobs, workers, [&](std::size_t job) {
    const std::size_t p = job / S;
    const std::uint64_t seed = config.seeds[job % S];
    return run_experiment(build_run_spec(config, batch.kernel, p, seed));
  });
  for (std::size_t j = 0; j < jobs; ++j) batch.policies[j / S].runs.push_back(std::move(results[j]));
  return batch;
}

double median_cum_regret(const PolicyRuns& runs, std::size_t t) {
  std::vector<double> v;
  v.reserve(runs.runs.size());
  for (const auto& r : runs.runs) v.push_back(r.trace.at(t - 1).cum_regret);
  return median(std::move(v));
}

namespace {

bool owned_file(const fs::path& p) {
  const std::string name = p.filename().string();
  auto starts = [&name](const char* prefix) { return name.rfind(prefix, 0) == 0; };
  return name == "config.json" || name == "summary.json" || starts("summary_") || starts("trace_") ||
         starts("objective_") || p.extension() == ".svg";
}

void prepare_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw InputError(dir.string() + ": exists and is not a directory");
    if (!fs::is_empty(dir, ec)) {
      if (!force) throw InputError(dir.string() + ": output directory is not empty (pass --force to overwrite)");
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && owned_file(e.path())) fs::remove(e.path());
      }
    }
  } else {
    fs::create_directories(dir, ec);
    if (ec) throw InputError(dir.string() + ": cannot create directory: " + ec.message());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw InputError(path.string() + ": write failed");
}

}  // namespace

void write_batch(const BatchResult& batch, const fs::path& dir, bool force) {
  prepare_dir(dir, force);
  const auto& grid = batch.kernel->grid();
  const auto& seeds = batch.config.seeds;
  const std::size_t T = batch.config.horizon;

  {
    const fs::path path = dir / "config.json";
    auto out = open_out(path);
    out << render_config(batch.config);
    close_out(out, path);
  }
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const fs::path path = dir / ("objective_seed" + std::to_string(seeds[s]) + ".csv");
    auto out = open_out(path);
    out << "x_index,x_value,f\n";
    const Objective& obj = batch.objectives[s];
    for (std::size_t i = 0; i < obj.values.size(); ++i) {
      out << i << ',' << format_point(grid, i) << ',' << format_real(obj.values[i]) << '\n';
    }
    close_out(out, path);
  }

  nlohmann::json summary;
  summary["horizon"] = T;
  summary["seeds"] = seeds;
  summary["policies"] = nlohmann::json::array();
  for (const auto& p : batch.policies) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const fs::path path = dir / ("trace_" + p.label + "_seed" + std::to_string(seeds[s]) + ".csv");
      auto out = open_out(path);
      write_trace_csv(out, p.label, p.runs[s].trace, grid);
      close_out(out, path);
    }

    const fs::path curve = dir / ("summary_" + p.label + ".csv");
    auto out = open_out(curve);
    out << "t,median,q25,q75\n";
    for (std::size_t t = 1; t <= T; ++t) {
      std::vector<double> v;
      for (const auto& r : p.runs) v.push_back(r.trace[t - 1].cum_regret);
      out << t << ',' << format_real(quantile(v, 0.5)) << ',' << format_real(quantile(v, 0.25)) << ','
          << format_real(quantile(v, 0.75)) << '\n';
    }
    close_out(out, curve);

    std::vector<double> final_regret;
    std::vector<double> simple;
    std::size_t passed = 0;
    std::size_t switched = 0;
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = p.runs[s];
      final_regret.push_back(r.cumulative_regret());
      simple.push_back(r.simple_regret);
      if (r.diagnostics.passed()) ++passed;
      if (r.diagnostics.switch_count) ++switched;
      for (const auto& msg : r.diagnostics.failures) failures.push_back({{"seed", seeds[s]}, {"message", msg}});
    }
    nlohmann::json entry;
    entry["label"] = p.label;
    entry["kind"] = std::string(policy_label(p.entry.kind));
    if (p.entry.C) entry["C"] = *p.entry.C;
    entry["runs"] = p.runs.size();
    entry["final_cum_regret"] = {{"median", quantile(final_regret, 0.5)},
                                 {"q25", quantile(final_regret, 0.25)},
                                 {"q75", quantile(final_regret, 0.75)}};
    entry["simple_regret_median"] = quantile(simple, 0.5);
    entry["assertions"] = {{"passed", passed}, {"failed", p.runs.size() - passed}};
    entry["failures"] = failures;
    if (p.entry.kind == PolicyKind::FastSlow) entry["switched_runs"] = switched;
    summary["policies"].push_back(entry);
  }
  const fs::path path = dir / "summary.json";
  auto out = open_out(path);
  out << summary.dump(2) << '\n';
  close_out(out, path);
}

std::size_t resolve_workers(std::optional<std::size_t> flag) {
  if (flag) {
    if (*flag == 0) throw ConfigError("--workers must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CTGP_WORKERS"); env && *env) {
    const std::string s(env);
    if (s.find_first_not_of("0123456789") != std::string::npos || std::stoull(s) == 0) {
      throw ConfigError("CTGP_WORKERS must be a positive integer, got '" + s + "'");
    }
    return std::stoull(s);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Figure1Metrics figure1_metrics(const BatchResult& batch) {
  const PolicyRuns* gp = nullptr;
  const PolicyRuns* a1 = nullptr;
  for (const auto& p : batch.policies) {
    if (p.entry.kind == PolicyKind::VanillaUcb && !gp) gp = &p;
    if (p.entry.kind == PolicyKind::KnownC && !a1) a1 = &p;
  }
  if (!gp || !a1) throw ConfigError("figure-1 metrics need a gp_ucb and a known_c policy");

  auto fractions = [&batch](const PolicyRuns& p) {
    std::vector<double> v;
    for (std::size_t s = 0; s < p.runs.size(); ++s) {
      v.push_back(post_exhaustion_optimal_fraction(p.runs[s], batch.objectives[s].x_star_index));
    }
    return median(std::move(v));
  };
  Figure1Metrics m;
  m.gp_fraction = fractions(*gp);
  m.a1_fraction = fractions(*a1);
  const std::size_t T = batch.config.horizon;
  m.t_two_thirds = (2 * T + 2) / 3;
  m.ratio_two_thirds = median_cum_regret(*gp, m.t_two_thirds) / median_cum_regret(*a1, m.t_two_thirds);
  m.ratio_final = median_cum_regret(*gp, T) / median_cum_regret(*a1, T);
  return m;
}

}  // namespace ctgp::cli
