#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ktb/optimizer.hpp"
#include "ktb/problem.hpp"

namespace ktb::harness {

enum class Method { random, ei, gp_trbo, hogp_trbo, gp_morbo, hogp_morbo };

Method parse_method(std::string_view id);
std::string method_name(Method m);
std::vector<std::string> method_ids();

struct BenchConfig {
  std::string problem = "env34";
  Method method = Method::hogp_trbo;
  Index n_trials = 20;
  std::uint64_t seed = 0;
  std::uint64_t world_seed = 7;
  /// Run directory; see resolve_out_dir.
  std::filesystem::path out_dir;
  Index jobs = 1;
  /// Write measured wall_ms instead of 0 (traces are then not reproducible).
  bool record_wall_time = false;
  /// Preset for the problem with any overrides applied.
  OptimizerConfig optimizer;
};

/// Desk-scale optimizer defaults for a problem id.
OptimizerConfig preset_for(std::string_view problem);

/// Parses a JSON document. Top-level keys: problem, method, trials, seed,
/// world_seed, out, jobs, wall_time, budget, and an "optimizer" object whose
/// keys override the preset (n_init, batch_size, budget, n_candidates,
/// n_trust_regions, sample_batch_size, precision, min_local_points,
/// warm_start, fit{max_iters, step_size, restarts, latent_dim}). Unknown
/// keys and incompatible method/problem pairs throw ConfigError.
BenchConfig parse_config(std::string_view json_text);

/// Throws ConfigError when the method cannot run on the problem.
void check_compatible(const CompositeProblem& problem, Method method);

/// out_dir if set, else $KTB_OUT_DIR/<problem>-<method>, else
/// runs/<problem>-<method>.
std::filesystem::path resolve_out_dir(const BenchConfig& config);

}  // namespace ktb::harness
