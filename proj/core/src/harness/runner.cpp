#include "ktb/harness/runner.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <json.hpp>

#include "ktb/errors.hpp"
#include "ktb/harness/svg.hpp"
#include "ktb/problems/registry.hpp"

#ifndef KTB_VERSION
#define KTB_VERSION "0.0.0"
#endif

namespace ktb::harness {
namespace {

// Shortest round-trip representation.
void put(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::string trial_file(Index trial) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%03lld.csv", static_cast<long long>(trial));
  return buf;
}

nlohmann::json optimizer_json(const OptimizerConfig& o) {
  return {{"n_init", o.n_init},
          {"batch_size", o.batch_size},
          {"budget", o.budget},
          {"n_candidates", o.n_candidates},
          {"n_trust_regions", o.n_trust_regions},
          {"sample_batch_size", o.sample_batch_size},
          {"precision", o.precision == Precision::mixed16 ? "mixed16" : "full64"},
          {"min_local_points", o.min_local_points},
          {"warm_start", o.warm_start},
          {"fit",
           {{"max_iters", o.fit.max_iters},
            {"step_size", o.fit.step_size},
            {"restarts", o.fit.restarts},
            {"latent_dim", o.fit.latent_dim}}}};
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "eval_index,n_trials,mean,se,ci_lower,ci_upper\n";
  for (const auto& r : rows) {
    out += std::to_string(r.eval_index) + "," + std::to_string(r.n) + ",";
    put(out, r.mean);
    out += ",";
    put(out, r.se);
    out += ",";
    put(out, r.lower);
    out += ",";
    put(out, r.upper);
    out += "\n";
  }
  return out;
}

TrialSeries series_of(const RunTrace& trace) {
  TrialSeries s;
  for (const auto& row : trace.rows) {
    if (!row.failed) s.emplace_back(row.eval_index, row.incumbent_or_hv);
  }
  return s;
}

}  // namespace

bool BenchResult::all_ok() const {
  for (const auto& t : trials) {
    if (!t.ok) return false;
  }
  return true;
}

std::uint64_t trial_seed(const BenchConfig& config, Index trial) {
  return config.seed + static_cast<std::uint64_t>(trial);
}

RunTrace run_trial(const BenchConfig& config, Index trial) {
  const CompositeProblem problem = problems::make_problem(config.problem, config.world_seed);
  check_compatible(problem, config.method);
  OptimizerConfig opt = config.optimizer;
  opt.seed = trial_seed(config, trial);
  switch (config.method) {
    case Method::random:
      return run_random(problem, opt);
    case Method::ei:
      return run_ei(problem, opt);
    case Method::gp_trbo:
      return run_trbo(problem, ModelKind::scalar_gp, opt);
    case Method::hogp_trbo:
      return run_trbo(problem, ModelKind::hogp, opt);
    case Method::gp_morbo:
      return run_morbo(problem, ModelKind::scalar_gp, opt);
    case Method::hogp_morbo:
      return run_morbo(problem, ModelKind::hogp, opt);
  }
  throw ConfigError("unhandled method");
}

std::string trace_csv(const RunTrace& trace, Index trial, bool wall_time) {
  std::string out = "trial,step,eval_index,objective_1";
  if (trace.n_objectives == 2) out += ",objective_2";
  out += ",incumbent_or_hv,wall_ms\n";
  for (const auto& row : trace.rows) {
    if (row.failed) continue;
    out += std::to_string(trial) + "," + std::to_string(row.step) + "," + std::to_string(row.eval_index);
    for (Index k = 0; k < row.objectives.size(); ++k) {
      out += ",";
      put(out, row.objectives[k]);
    }
    out += ",";
    put(out, row.incumbent_or_hv);
    out += ",";
    put(out, wall_time ? row.wall_ms : 0.0);
    out += "\n";
  }
  return out;
}

TrialSeries read_trace_series(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::size_t col_eval = header.size(), col_value = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "eval_index") col_eval = i;
    if (header[i] == "incumbent_or_hv") col_value = i;
  }
  if (col_eval == header.size() || col_value == header.size()) throw InvalidInputError("not a trace CSV: " + csv.string());
  TrialSeries out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw InvalidInputError("ragged row in " + csv.string());
    out.emplace_back(std::stoll(cells[col_eval]), std::stod(cells[col_value]));
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BenchResult run_benchmark(const BenchConfig& config) {
  config.optimizer.validate();
  check_compatible(problems::make_problem(config.problem, config.world_seed), config.method);

  BenchResult result;
  result.out_dir = resolve_out_dir(config);
  std::filesystem::create_directories(result.out_dir);
  result.trials.resize(static_cast<std::size_t>(config.n_trials));

  std::atomic<Index> next{0};
  auto worker = [&]() {
    for (Index t = next++; t < config.n_trials; t = next++) {
      TrialResult& tr = result.trials[static_cast<std::size_t>(t)];
      tr.trial = t;
      tr.seed = trial_seed(config, t);
      try {
        tr.trace = run_trial(config, t);
        write_atomic(result.out_dir / trial_file(t), trace_csv(tr.trace, t, config.record_wall_time));
        tr.ok = true;
      } catch (const std::exception& e) {
        tr.error = e.what();
      }
    }
  };
  const Index jobs = std::min(config.jobs, config.n_trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (Index j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<TrialSeries> series;
  for (const auto& tr : result.trials) {
    if (tr.ok) series.push_back(series_of(tr.trace));
  }
  result.summary = summarize(series);
  write_atomic(result.out_dir / "summary.csv", summary_csv(result.summary));

  const bool multi = config.method == Method::gp_morbo || config.method == Method::hogp_morbo ||
                     (!result.trials.empty() && result.trials.front().trace.n_objectives == 2);
  const std::string title = config.problem + " / " + method_name(config.method);
  write_atomic(result.out_dir / "trace.svg", trace_svg(result.summary, title, multi ? "hypervolume" : "best objective"));

  nlohmann::json manifest;
  manifest["config"] = {{"problem", config.problem},
                        {"method", method_name(config.method)},
                        {"trials", config.n_trials},
                        {"seed", config.seed},
                        {"world_seed", config.world_seed},
                        {"jobs", config.jobs},
                        {"wall_time", config.record_wall_time},
                        {"optimizer", optimizer_json(config.optimizer)}};
  manifest["versions"] = {{"ktb", KTB_VERSION},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__},
                          {"cxx", static_cast<long>(__cplusplus)}};
  manifest["trial_seed_rule"] = "seed + trial";
  manifest["trials"] = nlohmann::json::array();
  for (const auto& tr : result.trials) {
    nlohmann::json entry = {{"trial", tr.trial}, {"seed", tr.seed}, {"ok", tr.ok}};
    if (tr.ok) {
      entry["file"] = trial_file(tr.trial);
      if (tr.trace.ref_point.size() > 0) {
        entry["ref_point"] = std::vector<double>(tr.trace.ref_point.data(),
                                                 tr.trace.ref_point.data() + tr.trace.ref_point.size());
      }
      Index failed = 0;
      for (const auto& row : tr.trace.rows) failed += row.failed ? 1 : 0;
      entry["failed_evaluations"] = failed;
    } else {
      entry["error"] = tr.error;
    }
    manifest["trials"].push_back(std::move(entry));
  }
  manifest["files"] = {{"summary", "summary.csv"}, {"plot", "trace.svg"}};
  write_atomic(result.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace ktb::harness
