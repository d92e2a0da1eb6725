#pragma once

#include "ktb/fit.hpp"
#include "ktb/hogp.hpp"

namespace ktb {

/// Scalar-output GP with an ARD Matérn-5/2 kernel. Shares the HOGP
/// machinery with zero output modes, so samplers accept `hogp()` directly.
class ScalarGpModel {
 public:
  ScalarGpModel(Matrix train_x, Vector train_y, InputKernelHyper hyper, double noise_sigma2,
                OutputScaling scaling = {});
  explicit ScalarGpModel(HogpModel model);

  const HogpModel& hogp() const { return model_; }
  const Matrix& train_x() const { return model_.train_x(); }
  const InputKernelHyper& hyper() const { return model_.hyper(); }
  double noise_sigma2() const { return model_.noise_sigma2(); }

  Vector posterior_mean(const Matrix& x_test) const;
  /// Variance of the latent function (noise excluded), de-standardized.
  Vector posterior_variance(const Matrix& x_test) const;

 private:
  HogpModel model_;
};

ScalarGpModel fit_scalar_gp(const Matrix& train_x, const Vector& train_y, const FitConfig& config,
                            const std::optional<Vector>& warm_start = std::nullopt);

}  // namespace ktb
