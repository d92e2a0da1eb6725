// Command-line driver: benchmark runs, model-fit reports and golden files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktb/errors.hpp"
#include "ktb/harness/config.hpp"
#include "ktb/harness/fit_report.hpp"
#include "ktb/harness/runner.hpp"
#include "ktb/problems/golden.hpp"
#include "ktb/problems/optics.hpp"
#include "ktb/problems/registry.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ktb::ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string config_path;
  std::optional<std::string> problem, method, out;
  std::optional<long long> budget, trials, jobs;
  std::optional<std::uint64_t> seed;
  bool wall_time = false;
};

int do_run(const RunArgs& a) {
  nlohmann::json doc = nlohmann::json::object();
  if (!a.config_path.empty()) {
    try {
      doc = nlohmann::json::parse(slurp(a.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw ktb::ConfigError(std::string("invalid JSON in config: ") + e.what());
    }
  }
  if (a.problem) doc["problem"] = *a.problem;
  if (a.method) doc["method"] = *a.method;
  if (a.out) doc["out"] = *a.out;
  if (a.budget) doc["budget"] = *a.budget;
  if (a.trials) doc["trials"] = *a.trials;
  if (a.jobs) doc["jobs"] = *a.jobs;
  if (a.seed) doc["seed"] = *a.seed;
  if (a.wall_time) doc["wall_time"] = true;
  const ktb::harness::BenchConfig config = ktb::harness::parse_config(doc.dump());

  const auto result = ktb::harness::run_benchmark(config);
  std::cout << "wrote " << result.out_dir.string() << "\n";
  if (!result.summary.empty()) {
    const auto& last = result.summary.back();
    std::cout << "final mean " << last.mean << " (95% CI " << last.lower << " .. " << last.upper << ", "
              << last.n << " trials)\n";
  }
  for (const auto& t : result.trials) {
    if (!t.ok) std::cerr << "trial " << t.trial << " failed: " << t.error << "\n";
  }
  return result.all_ok() ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kronecker-structured tensor-output Bayesian optimization benchmarks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run a benchmark suite");
  run_cmd->add_option("--config", run.config_path, "JSON config file");
  run_cmd->add_option("--problem", run.problem, "env34 | env510 | coverage | optics | optics_desk");
  run_cmd->add_option("--method", run.method, "random | ei | gp_trbo | hogp_trbo | gp_morbo | hogp_morbo");
  run_cmd->add_option("--budget", run.budget, "evaluations per trial");
  run_cmd->add_option("--trials", run.trials, "number of seeded trials");
  run_cmd->add_option("--seed", run.seed, "base seed; trial t uses seed + t");
  run_cmd->add_option("--out", run.out, "run directory (default $KTB_OUT_DIR/<problem>-<method>)");
  run_cmd->add_option("--jobs", run.jobs, "trials run concurrently");
  run_cmd->add_flag("--wall-time", run.wall_time, "record measured wall_ms (breaks bitwise reproducibility)");

  std::string fr_problem = "optics_desk", fr_out = "fit_report";
  long long fr_train = 200, fr_test = 100;
  std::uint64_t fr_seed = 0, fr_world = 7;
  int fr_iters = ktb::FitConfig{}.max_iters, fr_restarts = ktb::FitConfig{}.restarts;
  auto* fr_cmd = app.add_subcommand("fit-report", "out-of-sample metric accuracy of HOGP vs scalar GP");
  fr_cmd->add_option("--problem", fr_problem);
  fr_cmd->add_option("--train", fr_train);
  fr_cmd->add_option("--test", fr_test);
  fr_cmd->add_option("--seed", fr_seed);
  fr_cmd->add_option("--world-seed", fr_world);
  fr_cmd->add_option("--max-iters", fr_iters);
  fr_cmd->add_option("--restarts", fr_restarts);
  fr_cmd->add_option("--out", fr_out);

  std::string golden_dir = ".";
  auto* golden_cmd = app.add_subcommand("golden", "write the synth_optics reference tensor (x = 0.5, world seed 7)");
  golden_cmd->add_option("--out", golden_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run_cmd->parsed()) return do_run(run);
    if (fr_cmd->parsed()) {
      if (fr_train < 2 || fr_test < 2) throw ktb::ConfigError("--train and --test must be >= 2");
      const auto problem = ktb::problems::make_problem(fr_problem, fr_world);
      ktb::FitConfig fit;
      fit.max_iters = fr_iters;
      fit.restarts = fr_restarts;
      const ktb::ModelKind models[] = {ktb::ModelKind::hogp, ktb::ModelKind::scalar_gp};
      const auto report = ktb::harness::fit_report(problem, models, fr_train, fr_test, fr_seed, fit);
      ktb::harness::write_fit_report(report, fr_out);
      for (std::size_t k = 0; k < report.models.size(); ++k) {
        std::cout << ktb::harness::model_name(report.models[k]) << " rmse:";
        for (ktb::Index j = 0; j < report.rmse.cols(); ++j) std::cout << " " << report.rmse(static_cast<ktb::Index>(k), j);
        std::cout << "\n";
      }
      return kOk;
    }
    if (golden_cmd->parsed()) {
      namespace kp = ktb::problems;
      std::filesystem::create_directories(golden_dir);
      const kp::OpticsWorld world(kp::OpticsShape::full(), 7);
      const ktb::Vector half = ktb::Vector::Constant(world.shape().dim, 0.5);
      kp::write_golden(std::filesystem::path(golden_dir) / "optics_half.f64", kp::synth_optics(half, world));
      return kOk;
    }
  } catch (const ktb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
