#pragma once

#include <cstdint>
#include <optional>

#include "ktb/hogp.hpp"

namespace ktb {

struct FitConfig {
  int max_iters = 200;
  double step_size = 0.05;
  int restarts = 2;
  std::uint64_t seed = 0;
  /// Latent coordinates per output mode.
  Index latent_dim = 2;
};

/// Fits every hyperparameter of a HOGP by Adam ascent on the exact log
/// marginal likelihood, keeping the best iterate over restarts+1 seeded
/// initializations. Outputs are standardized by a single global mean and
/// standard deviation; inputs must already lie in the unit cube.
///
/// `warm_start`, when given, replaces the first initialization (its
/// latent dimension and shapes must match).
HogpModel fit_hogp(const Matrix& train_x, const Tensor& train_y, const FitConfig& config,
                   const std::optional<Vector>& warm_start = std::nullopt);

/// Optimizer coordinates of a fitted model; suitable as a warm start.
Vector hogp_parameters(const HogpModel& model, Index latent_dim);

}  // namespace ktb
