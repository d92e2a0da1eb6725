#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ktb/fit.hpp"
#include "ktb/problem.hpp"
#include "ktb/sampling.hpp"
#include "ktb/trust_region.hpp"

namespace ktb {

enum class ModelKind {
  hogp,       ///< one HOGP on the output tensors; metrics applied to sampled tensors
  scalar_gp,  ///< one scalar GP per objective, fitted on observed metric values
};

struct OptimizerConfig {
  Index n_init = 10;
  Index batch_size = 1;
  Index budget = 100;
  /// Thompson candidates per trust region; 0 means min(100·d, 5000).
  Index n_candidates = 0;
  Index n_trust_regions = 5;
  std::uint64_t seed = 0;
  /// Defaults to TrustRegionConstants::for_problem(d, batch_size).
  std::optional<TrustRegionConstants> tr_constants;
  FitConfig fit;
  Index sample_batch_size = 64;
  Precision precision = Precision::mixed16;
  Index min_local_points = 10;
  /// Start each refit from the previous hyperparameters of the same region.
  bool warm_start = true;

  void validate() const;
  Index candidates_for(Index dim) const;
};

/// One row per evaluation, in evaluation order.
struct TraceRow {
  Index step = 0;  ///< 0 for the initial design, then one per batch
  Index eval_index = 0;
  Vector x;
  Vector objectives;  ///< empty when the evaluation failed
  /// Best objective so far (single objective) or archive hypervolume.
  double incumbent_or_hv = 0.0;
  double wall_ms = 0.0;  ///< since the start of the run
  bool failed = false;
};

struct RunTrace {
  Index n_objectives = 1;
  std::vector<TraceRow> rows;
  /// Hypervolume reference point (multi-objective runs only).
  Vector ref_point;
};

/// Single-objective trust-region BO with Thompson sampling.
RunTrace run_trbo(const CompositeProblem& problem, ModelKind kind, const OptimizerConfig& config);

/// Two-objective BO with several trust regions and hypervolume-improvement
/// Thompson selection.
RunTrace run_morbo(const CompositeProblem& problem, ModelKind kind, const OptimizerConfig& config);

/// Scrambled Sobol points for the whole budget. The first n_init points are
/// the initial design shared by every other method with the same seed.
RunTrace run_random(const CompositeProblem& problem, const OptimizerConfig& config);

/// Global scalar GP with analytic expected improvement maximized over a
/// fresh Sobol candidate set; the q best distinct candidates form a batch.
RunTrace run_ei(const CompositeProblem& problem, const OptimizerConfig& config);

}  // namespace ktb
