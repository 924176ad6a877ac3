#include "ctgp_cli/app.hpp"

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ctgp/errors.hpp"
#include "ctgp_cli/batch.hpp"
#include "ctgp_cli/config.hpp"
#include "ctgp_cli/plot.hpp"
#include "ctgp_cli/trace_csv.hpp"

namespace ctgp::cli {
namespace {

struct Options {
  std::string config;
  std::string seeds;
  std::string out;
  std::optional<std::size_t> workers;
  bool force = false;
  std::string dir;
};

ExperimentConfig configured(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (!o.seeds.empty()) c.seeds = parse_seeds(o.seeds);
  if (!o.out.empty()) c.output = o.out;
  return c;
}

void report_failures(const BatchResult& batch, std::ostream& err) {
  for (const auto& p : batch.policies) {
    for (std::size_t s = 0; s < p.runs.size(); ++s) {
      for (const auto& msg : p.runs[s].diagnostics.failures) {
        err << "assertion failed: " << p.label << " seed " << batch.config.seeds[s] << ": " << msg << '\n';
      }
    }
  }
}

void print_summary(const BatchResult& batch, std::ostream& out) {
  const std::size_t T = batch.config.horizon;
  for (const auto& p : batch.policies) {
    out << p.label << ": median R_T = " << format_real(median_cum_regret(p, T)) << " over " << p.runs.size()
        << " seed(s)\n";
  }
}

int do_batch(const ExperimentConfig& c, const Options& o, std::ostream& out, std::ostream& err) {
  if (c.output.empty()) throw ConfigError("output: set --out DIR or 'output' in the config");
  const BatchResult batch = execute_batch(c, resolve_workers(o.workers));
  write_batch(batch, c.output, o.force);
  print_summary(batch, out);
  out << "results written to " << c.output << '\n';
  report_failures(batch, err);
  return batch.failed_runs() ? kExitAssertion : kExitOk;
}

int do_run(ExperimentConfig c, const Options& o, std::ostream& out, std::ostream& err) {
  c.seeds.resize(1);
  if (!o.out.empty()) return do_batch(c, o, out, err);
  const BatchResult batch = execute_batch(c, 1);
  for (std::size_t i = 0; i < batch.policies.size(); ++i) {
    const auto& p = batch.policies[i];
    if (i == 0) {
      write_trace_csv(out, p.label, p.runs[0].trace, batch.kernel->grid());
    } else {
      // Continue the same table without repeating the header.
      std::ostringstream tmp;
      write_trace_csv(tmp, p.label, p.runs[0].trace, batch.kernel->grid());
      const std::string body = tmp.str();
      out << body.substr(body.find('\n') + 1);
    }
  }
  report_failures(batch, err);
  return batch.failed_runs() ? kExitAssertion : kExitOk;
}

int do_demo(const Options& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = figure1_config();
  if (!o.seeds.empty()) c.seeds = parse_seeds(o.seeds);
  if (!o.out.empty()) c.output = o.out;
  const BatchResult batch = execute_batch(c, resolve_workers(o.workers));
  write_batch(batch, c.output, o.force);
  const PlotReport plots = emit_plot(c.output);
  const Figure1Metrics m = figure1_metrics(batch);
  out << "post-exhaustion fraction of rounds at x* (median): gp_ucb " << format_real(m.gp_fraction) << ", known_c "
      << format_real(m.a1_fraction) << (m.fraction_ok() ? "  [ok]" : "  [not reproduced]") << '\n';
  out << "median R_t ratio gp_ucb/known_c: t=" << m.t_two_thirds << " " << format_real(m.ratio_two_thirds)
      << ", t=" << c.horizon << " " << format_real(m.ratio_final)
      << (m.superlinear_ok() ? "  [ok]" : "  [not reproduced]") << '\n';
  for (const auto& p : plots.written) out << "wrote " << p.string() << '\n';
  report_failures(batch, err);
  const bool ok = batch.failed_runs() == 0 && m.fraction_ok() && m.superlinear_ok();
  return ok ? kExitOk : kExitAssertion;
}

int do_plot(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string dir = !o.dir.empty() ? o.dir : o.out;
  if (dir.empty()) throw ConfigError("plot: give the results directory");
  const PlotReport report = emit_plot(dir);
  for (const auto& p : report.written) out << "wrote " << p.string() << '\n';
  for (const auto& m : report.missing) err << "missing series: " << m << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process bandit optimization under adversarial corruption", "ctgp"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool config, bool seeds, bool workers) {
    if (config) sub->add_option("--config", o.config, "Experiment config (JSON)")->required();
    if (seeds) sub->add_option("--seeds", o.seeds, "N for seeds 1..N, or a comma-separated list");
    sub->add_option("--out", o.out, "Results directory");
    if (workers) sub->add_option("--workers", o.workers, "Worker threads (overrides CTGP_WORKERS)");
    sub->add_flag("--force", o.force, "Overwrite results in a non-empty directory");
  };
  auto* run = app.add_subcommand("run", "Run one seed of a config; trace to stdout unless --out");
  add_common(run, true, true, false);
  auto* batch = app.add_subcommand("batch", "Run a config over a seed sweep and write results");
  add_common(batch, true, true, true);
  auto* plot = app.add_subcommand("plot", "Render SVG plots for a results directory");
  plot->add_option("dir", o.dir, "Results directory");
  plot->add_option("--out", o.out, "Results directory");
  auto* validate = app.add_subcommand("validate", "Check a config and list every violation");
  validate->add_option("--config", o.config, "Experiment config (JSON)")->required();
  auto* demo = app.add_subcommand("demo-figure1", "Region-corruption demo: GP-UCB against known-C UCB");
  add_common(demo, false, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ctgp: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*run) return do_run(configured(o), o, out, err);
    if (*batch) return do_batch(configured(o), o, out, err);
    if (*plot) return do_plot(o, out, err);
    if (*validate) {
      const ExperimentConfig c = load_config(o.config);
      out << o.config << ": ok (" << c.policies.size() << " policies, " << c.seeds.size() << " seeds, T="
          << c.horizon << ")\n";
      return kExitOk;
    }
    if (*demo) return do_demo(o, out, err);
  } catch (const std::invalid_argument& e) {
    // ConfigError and InputError, including I/O problems with named paths.
    err << "ctgp: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "ctgp: internal error: " << e.what() << '\n';
    return kExitAssertion;
  }
  return kExitConfig;
}

}  // namespace ctgp::cli
