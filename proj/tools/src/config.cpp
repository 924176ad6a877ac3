#include "ctgp_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctgp/errors.hpp"

namespace ctgp::cli {
namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }

  // Reports keys of `obj` outside `known`.
  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
      error(path, "expected an object");
      return;
    }
    std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) error(join(path, key), "unknown field");
    }
  }

  void number(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(join(path, key), "expected a number");
      return;
    }
    out = v.get<double>();
  }

  void optional_number(const json& obj, const char* key, const std::string& path, std::optional<double>& out) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return;
    double v = 0.0;
    number(obj, key, path, v);
    if (obj.at(key).is_number()) out = v;
  }

  void count(const json& obj, const char* key, const std::string& path, std::size_t& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      error(join(path, key), "expected a non-negative integer");
      return;
    }
    out = v.get<std::size_t>();
  }

  void string(const json& obj, const char* key, const std::string& path, std::string& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      error(join(path, key), "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void boolean(const json& obj, const char* key, const std::string& path, bool& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      error(join(path, key), "expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  void numbers(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      error(join(path, key), "expected an array of numbers");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        error(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      out.push_back(v[i].get<double>());
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string>& errors_;
};

std::string gamma_label(GammaMode m) { return m == GammaMode::Realized ? "realized" : "analytic_se"; }

void read_config(const json& root, ExperimentConfig& c, Reader& r) {
  r.check_keys(root, "", {"grid", "kernel", "objective", "policies", "params", "noise_std", "adversary",
                          "seeds", "output"});
  if (!root.is_object()) return;

  if (root.contains("grid")) {
    const json& g = root["grid"];
    r.check_keys(g, "grid", {"lower", "upper", "resolution"});
    r.numbers(g, "lower", "grid", c.grid.lower);
    r.numbers(g, "upper", "grid", c.grid.upper);
    r.count(g, "resolution", "grid", c.grid.resolution);
  }
  if (root.contains("kernel")) {
    const json& k = root["kernel"];
    r.check_keys(k, "kernel", {"family", "lengthscale", "nu", "scale"});
    r.string(k, "family", "kernel", c.kernel.family);
    r.number(k, "lengthscale", "kernel", c.kernel.lengthscale);
    r.number(k, "nu", "kernel", c.kernel.nu);
    r.number(k, "scale", "kernel", c.kernel.scale);
  }
  if (root.contains("objective")) {
    const json& o = root["objective"];
    r.check_keys(o, "objective", {"type", "B", "num_centers", "local_height", "values", "seed"});
    r.string(o, "type", "objective", c.objective.type);
    r.number(o, "B", "objective", c.objective.B);
    r.count(o, "num_centers", "objective", c.objective.num_centers);
    r.number(o, "local_height", "objective", c.objective.local_height);
    r.numbers(o, "values", "objective", c.objective.values);
    if (o.is_object() && o.contains("seed") && !o["seed"].is_null()) {
      if (o["seed"].is_number_unsigned()) {
        c.objective.seed = o["seed"].get<std::uint64_t>();
      } else {
        r.error("objective.seed", "expected a non-negative integer");
      }
    }
  }
  if (root.contains("policies")) {
    const json& ps = root["policies"];
    if (!ps.is_array()) {
      r.error("policies", "expected an array");
    } else {
      c.policies.clear();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string path = "policies[" + std::to_string(i) + "]";
        r.check_keys(ps[i], path, {"kind", "C"});
        PolicyEntry e;
        std::string kind;
        r.string(ps[i], "kind", path, kind);
        if (auto k = parse_policy_kind(kind)) {
          e.kind = *k;
        } else {
          r.error(path + ".kind", "unknown policy '" + kind + "' (gp_ucb, known_c, fast_slow, layered)");
        }
        r.optional_number(ps[i], "C", path, e.C);
        c.policies.push_back(e);
      }
    }
  }
  if (root.contains("params")) {
    const json& p = root["params"];
    r.check_keys(p, "params", {"B", "B0", "sigma", "lambda", "delta", "alpha", "horizon", "gamma"});
    r.optional_number(p, "B", "params", c.B);
    r.optional_number(p, "B0", "params", c.B0);
    r.optional_number(p, "sigma", "params", c.sigma);
    r.number(p, "lambda", "params", c.lambda);
    r.number(p, "delta", "params", c.delta);
    r.number(p, "alpha", "params", c.alpha);
    r.count(p, "horizon", "params", c.horizon);
    std::string gamma = gamma_label(c.gamma_mode);
    r.string(p, "gamma", "params", gamma);
    if (gamma == "realized") {
      c.gamma_mode = GammaMode::Realized;
    } else if (gamma == "analytic_se") {
      c.gamma_mode = GammaMode::AnalyticSE;
    } else {
      r.error("params.gamma", "expected 'realized' or 'analytic_se'");
    }
  }
  r.optional_number(root, "noise_std", "", c.noise_std);
  if (root.contains("adversary")) {
    const json& a = root["adversary"];
    r.check_keys(a, "adversary", {"kind", "C", "radius", "always_active", "fraction", "target_index", "delta"});
    std::string kind = adversary_label(c.adversary.kind);
    r.string(a, "kind", "adversary", kind);
    if (auto k = parse_adversary_kind(kind)) {
      c.adversary.kind = *k;
    } else {
      r.error("adversary.kind", "unknown adversary '" + kind + "' (zero, region, flatten, swap)");
    }
    r.number(a, "C", "adversary", c.adversary.budget);
    r.number(a, "radius", "adversary", c.adversary.radius);
    r.boolean(a, "always_active", "adversary", c.adversary.always_active);
    r.number(a, "fraction", "adversary", c.adversary.fraction);
    r.count(a, "target_index", "adversary", c.adversary.target_index);
    r.number(a, "delta", "adversary", c.adversary.delta);
  }
  if (root.contains("seeds")) {
    const json& s = root["seeds"];
    if (s.is_number_unsigned()) {
      c.seeds = parse_seeds(std::to_string(s.get<std::uint64_t>()));
    } else if (s.is_array()) {
      c.seeds.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number_unsigned()) {
          r.error("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
          continue;
        }
        c.seeds.push_back(s[i].get<std::uint64_t>());
      }
    } else {
      r.error("seeds", "expected a count or an array of integers");
    }
  }
  r.string(root, "output", "", c.output);
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> e;
  auto bad = [&e](const std::string& path, const std::string& what) { e.push_back(path + ": " + what); };

  if (c.grid.lower.empty()) bad("grid.lower", "must have at least one coordinate");
  if (c.grid.lower.size() != c.grid.upper.size()) bad("grid.upper", "must have the same length as grid.lower");
  for (std::size_t i = 0; i < std::min(c.grid.lower.size(), c.grid.upper.size()); ++i) {
    if (!(c.grid.lower[i] < c.grid.upper[i])) bad("grid.upper[" + std::to_string(i) + "]", "must exceed grid.lower");
  }
  if (c.grid.resolution < 2) bad("grid.resolution", "must be >= 2");
  std::size_t grid_size = 1;
  for (std::size_t i = 0; i < c.grid.lower.size(); ++i) grid_size *= c.grid.resolution;

  if (c.kernel.family != "se" && c.kernel.family != "matern" && c.kernel.family != "linear") {
    bad("kernel.family", "expected se, matern or linear");
  }
  if (!(c.kernel.lengthscale > 0.0)) bad("kernel.lengthscale", "must be > 0");
  if (c.kernel.family == "matern" && c.kernel.nu != 0.5 && c.kernel.nu != 1.5 && c.kernel.nu != 2.5) {
    bad("kernel.nu", "must be 0.5, 1.5 or 2.5");
  }
  if (!(c.kernel.scale > 0.0)) bad("kernel.scale", "must be > 0");

  const auto& o = c.objective;
  if (o.type != "rkhs_sample" && o.type != "two_peak" && o.type != "values") {
    bad("objective.type", "expected rkhs_sample, two_peak or values");
  }
  if (!(o.B > 0.0)) bad("objective.B", "must be > 0");
  if (o.num_centers < 1) bad("objective.num_centers", "must be >= 1");
  if (o.type == "two_peak") {
    if (!(o.local_height > 0.0 && o.local_height < 1.0)) bad("objective.local_height", "must be in (0, 1)");
    if (c.grid.lower.size() != 1) bad("objective.type", "two_peak needs a 1-D grid");
  }
  if (o.type == "values" && o.values.size() != grid_size) {
    bad("objective.values", "expected " + std::to_string(grid_size) + " values, one per grid point");
  }

  if (c.policies.empty()) bad("policies", "must list at least one policy");
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    const std::string path = "policies[" + std::to_string(i) + "]";
    const auto& p = c.policies[i];
    const bool known = p.kind == PolicyKind::KnownC || p.kind == PolicyKind::FastSlow;
    if (known && !p.C) bad(path + ".C", "required for " + std::string(policy_label(p.kind)));
    if (!known && p.C) {
      bad(path + ".C", std::string(policy_label(p.kind)) + " does not take C (the adversary's C is set under adversary.C)");
    }
    if (p.C && !(*p.C >= 0.0)) bad(path + ".C", "must be >= 0");
  }

  if (c.B && !(*c.B >= 0.0)) bad("params.B", "must be >= 0");
  if (c.B0 && !(*c.B0 >= 0.0)) bad("params.B0", "must be >= 0");
  if (c.sigma && !(*c.sigma >= 0.0)) bad("params.sigma", "must be >= 0");
  if (!(c.lambda > 0.0)) bad("params.lambda", "must be > 0");
  if (!(c.delta > 0.0 && c.delta < 1.0)) bad("params.delta", "must be in (0, 1)");
  if (!(c.alpha >= 1.0)) bad("params.alpha", "must be >= 1");
  if (c.horizon < 1) bad("params.horizon", "must be >= 1");
  if (c.noise_std && !(*c.noise_std >= 0.0)) bad("noise_std", "must be >= 0");

  const auto& a = c.adversary;
  if (!(a.budget >= 0.0)) bad("adversary.C", "must be >= 0");
  if (!(a.radius >= 0.0)) bad("adversary.radius", "must be >= 0");
  if (!(a.fraction >= 0.0)) bad("adversary.fraction", "must be >= 0");
  if (!(a.delta >= 0.0)) bad("adversary.delta", "must be >= 0");
  if (a.kind == AdversaryKind::Swap && a.target_index >= grid_size) {
    bad("adversary.target_index", "outside the grid");
  }

  if (c.seeds.empty()) bad("seeds", "must list at least one seed");
  return e;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  ExperimentConfig c;
  std::vector<std::string> errors;
  Reader reader(errors);
  read_config(root, c, reader);
  for (auto& msg : validate_config(c)) errors.push_back(std::move(msg));
  if (!errors.empty()) throw ConfigError(join_lines(errors));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& c) {
  json root;
  root["grid"] = {{"lower", c.grid.lower}, {"upper", c.grid.upper}, {"resolution", c.grid.resolution}};
  root["kernel"] = {{"family", c.kernel.family},
                    {"lengthscale", c.kernel.lengthscale},
                    {"nu", c.kernel.nu},
                    {"scale", c.kernel.scale}};
  json obj = {{"type", c.objective.type},
              {"B", c.objective.B},
              {"num_centers", c.objective.num_centers},
              {"local_height", c.objective.local_height},
              {"values", c.objective.values}};
  obj["seed"] = c.objective.seed ? json(*c.objective.seed) : json(nullptr);
  root["objective"] = obj;
  json policies = json::array();
  for (const auto& p : c.policies) {
    json e = {{"kind", std::string(policy_label(p.kind))}};
    if (p.C) e["C"] = *p.C;
    policies.push_back(e);
  }
  root["policies"] = policies;
  json params = {{"lambda", c.lambda},
                 {"delta", c.delta},
                 {"alpha", c.alpha},
                 {"horizon", c.horizon},
                 {"gamma", gamma_label(c.gamma_mode)}};
  params["B"] = c.B ? json(*c.B) : json(nullptr);
  params["B0"] = c.B0 ? json(*c.B0) : json(nullptr);
  params["sigma"] = c.sigma ? json(*c.sigma) : json(nullptr);
  root["params"] = params;
  root["noise_std"] = c.noise_std ? json(*c.noise_std) : json(nullptr);
  root["adversary"] = {{"kind", adversary_label(c.adversary.kind)},
                       {"C", c.adversary.budget},
                       {"radius", c.adversary.radius},
                       {"always_active", c.adversary.always_active},
                       {"fraction", c.adversary.fraction},
                       {"target_index", c.adversary.target_index},
                       {"delta", c.adversary.delta}};
  root["seeds"] = c.seeds;
  root["output"] = c.output;
  return root.dump(2) + "\n";
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto parse_one = [&text](const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("--seeds: expected N or a comma-separated list of integers, got '" + text + "'");
    }
    return std::stoull(tok);
  };
  std::vector<std::uint64_t> seeds;
  if (text.find(',') == std::string::npos) {
    const auto n = parse_one(text);
    if (n == 0) throw ConfigError("--seeds: N must be >= 1");
    for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) seeds.push_back(parse_one(tok));
  return seeds;
}

GridKernelPtr build_grid_kernel(const ExperimentConfig& c) {
  auto grid = DomainGrid::uniform(c.grid.lower, c.grid.upper, c.grid.resolution);
  KernelSpec spec = c.kernel.family == "matern" ? KernelSpec::matern(c.kernel.nu, c.kernel.lengthscale)
                    : c.kernel.family == "linear" ? KernelSpec::linear(c.kernel.scale)
                                                  : KernelSpec::squared_exponential(c.kernel.lengthscale);
  return make_grid_kernel(std::move(grid), spec);
}

Objective build_objective(const ExperimentConfig& c, const GridKernel& kernel, std::uint64_t seed) {
  if (c.objective.type == "two_peak") return two_peak_objective(kernel, c.objective.local_height);
  if (c.objective.type == "values") return Objective::from_values(c.objective.values, c.objective.B);
  Rng rng(c.objective.seed.value_or(seed), streams::kObjective);
  return sample_rkhs_objective(kernel, c.objective.B, rng, c.objective.num_centers);
}

RunSpec build_run_spec(const ExperimentConfig& c, const GridKernelPtr& kernel, std::size_t policy_index,
                       std::uint64_t seed) {
  RunSpec spec;
  spec.kernel = kernel;
  spec.objective = build_objective(c, *kernel, seed);
  spec.noise_std = c.noise_std;
  spec.seed = seed;
  spec.adversary = c.adversary;

  const PolicyEntry& entry = c.policies.at(policy_index);
  spec.policy.kind = entry.kind;
  PolicyParams& p = spec.policy.params;
  p.beta.B = c.B.value_or(spec.objective.B);
  p.beta.B0 = c.B0.value_or(spec.objective.B0);
  p.beta.sigma = c.sigma.value_or(effective_noise_std(spec));
  p.beta.lambda = c.lambda;
  p.beta.delta = c.delta;
  p.alpha = c.alpha;
  p.C = entry.C;
  p.horizon = c.horizon;
  p.gamma_mode = c.gamma_mode;
  return spec;
}

ExperimentConfig figure1_config() {
  ExperimentConfig c;
  c.grid = {{0.0}, {1.0}, 30};
  c.kernel.family = "se";
  c.kernel.lengthscale = 0.15;
  c.objective.type = "two_peak";
  c.objective.local_height = 0.85;
  c.policies = {PolicyEntry{PolicyKind::VanillaUcb, std::nullopt}, PolicyEntry{PolicyKind::KnownC, 3.5}};
  c.lambda = 0.01;
  c.horizon = 300;
  c.adversary.kind = AdversaryKind::Region;
  c.adversary.budget = 3.5;
  c.adversary.radius = 0.15;
  c.seeds = parse_seeds("20");
  c.output = "figure1";
  return c;
}

}  // namespace ctgp::cli
