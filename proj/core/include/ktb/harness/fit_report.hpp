#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ktb/fit.hpp"
#include "ktb/optimizer.hpp"
#include "ktb/problem.hpp"

namespace ktb::harness {

/// Out-of-sample metric predictions. The HOGP predicts the output tensor
/// and applies the metrics to its posterior mean; the scalar GP is fitted
/// to each metric directly.
struct FitReport {
  std::vector<ModelKind> models;
  Matrix actual;                   ///< n_test × objectives (observed)
  std::vector<Matrix> predicted;   ///< one n_test × objectives per model
  Matrix rmse;                     ///< models × objectives
};

/// Train and holdout are consecutive blocks of one scrambled Sobol sequence,
/// so they never share a point.
FitReport fit_report(const CompositeProblem& problem, std::span<const ModelKind> models, Index n_train, Index n_test,
                     std::uint64_t seed, const FitConfig& fit);

/// fit_predictions.csv (model,point,metric,predicted,actual) and
/// fit_rmse.csv (model,metric,rmse).
void write_fit_report(const FitReport& report, const std::filesystem::path& dir);

std::string model_name(ModelKind kind);

}  // namespace ktb::harness
