#include "ktb/harness/config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "ktb/errors.hpp"
#include "ktb/problems/registry.hpp"

namespace ktb::harness {
namespace {

using nlohmann::json;

const std::vector<std::pair<Method, std::string>>& method_table() {
  static const std::vector<std::pair<Method, std::string>> table = {
      {Method::random, "random"},       {Method::ei, "ei"},
      {Method::gp_trbo, "gp_trbo"},     {Method::hogp_trbo, "hogp_trbo"},
      {Method::gp_morbo, "gp_morbo"},   {Method::hogp_morbo, "hogp_morbo"},
  };
  return table;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Index positive(const json& obj, const char* key, Index fallback, Index min = 1) {
  const auto v = get<std::int64_t>(obj, key, fallback);
  if (v < min) throw ConfigError(std::string("'") + key + "' must be >= " + std::to_string(min));
  return v;
}

void apply_overrides(OptimizerConfig& opt, const json& o) {
  reject_unknown(o,
                 {"n_init", "batch_size", "budget", "n_candidates", "n_trust_regions", "sample_batch_size",
                  "precision", "min_local_points", "warm_start", "fit"},
                 "optimizer");
  opt.n_init = positive(o, "n_init", opt.n_init);
  opt.batch_size = positive(o, "batch_size", opt.batch_size);
  opt.budget = positive(o, "budget", opt.budget);
  opt.n_candidates = positive(o, "n_candidates", opt.n_candidates, 0);
  opt.n_trust_regions = positive(o, "n_trust_regions", opt.n_trust_regions);
  opt.sample_batch_size = positive(o, "sample_batch_size", opt.sample_batch_size);
  opt.min_local_points = positive(o, "min_local_points", opt.min_local_points, 2);
  opt.warm_start = get<bool>(o, "warm_start", opt.warm_start);
  if (o.contains("precision")) {
    const auto p = get<std::string>(o, "precision", "");
    if (p == "mixed16") {
      opt.precision = Precision::mixed16;
    } else if (p == "full64") {
      opt.precision = Precision::full64;
    } else {
      throw ConfigError("precision must be mixed16 or full64");
    }
  }
  if (o.contains("fit")) {
    const json& f = o.at("fit");
    if (!f.is_object()) throw ConfigError("'fit' must be an object");
    reject_unknown(f, {"max_iters", "step_size", "restarts", "latent_dim"}, "optimizer.fit");
    opt.fit.max_iters = static_cast<int>(positive(f, "max_iters", opt.fit.max_iters, 0));
    opt.fit.restarts = static_cast<int>(positive(f, "restarts", opt.fit.restarts, 0));
    opt.fit.latent_dim = positive(f, "latent_dim", opt.fit.latent_dim);
    opt.fit.step_size = get<double>(f, "step_size", opt.fit.step_size);
    if (!(opt.fit.step_size > 0.0)) throw ConfigError("fit.step_size must be positive");
  }
}

}  // namespace

Method parse_method(std::string_view id) {
  for (const auto& [m, name] : method_table()) {
    if (name == id) return m;
  }
  throw ConfigError("unknown method '" + std::string(id) + "'");
}

std::string method_name(Method m) {
  for (const auto& [mm, name] : method_table()) {
    if (mm == m) return name;
  }
  return "unknown";
}

std::vector<std::string> method_ids() {
  std::vector<std::string> out;
  for (const auto& [m, name] : method_table()) out.push_back(name);
  return out;
}

OptimizerConfig preset_for(std::string_view problem) {
  OptimizerConfig c;
  c.fit.max_iters = 100;
  c.fit.restarts = 1;
  if (problem == "env34" || problem == "env510") {
    c.n_init = 10;
    c.batch_size = 3;
    c.budget = 100;
  } else if (problem == "coverage") {
    c.n_init = 20;
    c.batch_size = 5;
    c.budget = 150;
  } else if (problem == "optics_desk" || problem == "constant_desk") {
    c.n_init = 60;
    c.batch_size = 10;
    c.budget = 600;
    c.n_trust_regions = 5;
  } else if (problem == "optics") {
    c.n_init = 400;
    c.batch_size = 50;
    c.budget = 5000;
    c.n_trust_regions = 5;
  } else {
    throw ConfigError("unknown problem '" + std::string(problem) + "'");
  }
  return c;
}

BenchConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"problem", "method", "trials", "seed", "world_seed", "out", "jobs", "wall_time", "budget",
                  "optimizer"},
                 "config");
  BenchConfig c;
  c.problem = get<std::string>(doc, "problem", c.problem);
  c.method = parse_method(get<std::string>(doc, "method", method_name(c.method)));
  c.n_trials = positive(doc, "trials", c.n_trials);
  c.seed = get<std::uint64_t>(doc, "seed", c.seed);
  c.world_seed = get<std::uint64_t>(doc, "world_seed", c.world_seed);
  c.out_dir = get<std::string>(doc, "out", "");
  c.jobs = positive(doc, "jobs", c.jobs);
  c.record_wall_time = get<bool>(doc, "wall_time", false);
  c.optimizer = preset_for(c.problem);
  if (doc.contains("optimizer")) {
    if (!doc.at("optimizer").is_object()) throw ConfigError("'optimizer' must be an object");
    apply_overrides(c.optimizer, doc.at("optimizer"));
  }
  c.optimizer.budget = positive(doc, "budget", c.optimizer.budget);
  c.optimizer.validate();
  check_compatible(problems::make_problem(c.problem, c.world_seed), c.method);
  return c;
}

void check_compatible(const CompositeProblem& problem, Method method) {
  const bool multi = method == Method::gp_morbo || method == Method::hogp_morbo;
  if (method == Method::random) return;
  if (multi && problem.n_objectives != 2) {
    throw ConfigError(method_name(method) + " needs a two-objective problem; '" + problem.name + "' has " +
                      std::to_string(problem.n_objectives));
  }
  if (!multi && problem.n_objectives != 1) {
    throw ConfigError(method_name(method) + " needs a single-objective problem; '" + problem.name + "' has " +
                      std::to_string(problem.n_objectives));
  }
}

std::filesystem::path resolve_out_dir(const BenchConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  const std::string leaf = config.problem + "-" + method_name(config.method);
  if (const char* root = std::getenv("KTB_OUT_DIR"); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / leaf;
  }
  return std::filesystem::path("runs") / leaf;
}

}  // namespace ktb::harness
