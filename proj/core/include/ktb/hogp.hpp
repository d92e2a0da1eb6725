#pragma once

#include <cstdint>
#include <vector>

#include "ktb/kernels.hpp"
#include "ktb/linalg.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

/// Latent coordinates for each output mode; mode j is a d_j × q matrix.
struct LatentFeatures {
  std::vector<Matrix> modes;
};

/// Affine map between raw outputs and the standardized values the model
/// is fitted on: raw = mean + scale · standardized.
struct OutputScaling {
  double mean = 0.0;
  double scale = 1.0;

  /// Single mean and standard deviation over every entry of `y`.
  static OutputScaling from_data(const Vector& y);
};

/// Lower bound on the noise variance used by the fitter.
inline constexpr double kNoiseFloor = 1e-6;

/// High-order GP over tensor outputs with prior covariance
/// K_XX ⊗ K_2 ⊗ … ⊗ K_k + σ²I, where K_XX is a Matérn-5/2 ARD Gram matrix
/// over inputs and each K_j is a latent RBF Gram matrix over that mode's
/// latent coordinates.
///
/// The model is immutable: the eigendecompositions of every factor and
/// the solve against the standardized training outputs are computed once
/// in the constructor. A model with no output modes is an ordinary
/// scalar-output GP.
class HogpModel {
 public:
  HogpModel(Matrix train_x, Tensor train_y, InputKernelHyper hyper, LatentFeatures latents, double noise_sigma2,
            OutputScaling scaling = {});

  Index num_train() const { return train_x_.rows(); }
  Index input_dim() const { return train_x_.cols(); }
  /// Output modes d_2 … d_k (empty for scalar outputs).
  Shape output_shape() const;
  Index output_size() const;
  /// n, d_2, …, d_k.
  const Shape& joint_shape() const { return train_y_.shape(); }

  const Matrix& train_x() const { return train_x_; }
  const Tensor& train_y() const { return train_y_; }
  const InputKernelHyper& hyper() const { return hyper_; }
  const LatentFeatures& latents() const { return latents_; }
  double noise_sigma2() const { return noise_; }
  const OutputScaling& scaling() const { return scaling_; }

  /// (vec(y) − mean) / scale.
  const Vector& standardized_y() const { return y_std_; }
  /// Gram matrices: K_XX first, then one per output mode.
  const std::vector<Matrix>& factors() const { return factors_; }
  const std::vector<EigenPair>& eigs() const { return eigs_; }
  /// (K + σ²I)⁻¹ standardized_y.
  const Vector& alpha() const { return alpha_; }

  Matrix cross_kernel(const Matrix& x_test) const;

 private:
  Matrix train_x_;
  Tensor train_y_;
  InputKernelHyper hyper_;
  LatentFeatures latents_;
  double noise_;
  OutputScaling scaling_;

  Vector y_std_;
  std::vector<Matrix> factors_;
  std::vector<EigenPair> eigs_;
  Vector alpha_;
};

/// Exact Gaussian log marginal likelihood of the standardized outputs.
double hogp_mll(const HogpModel& model);

/// Posterior mean at x_test (m × d), de-standardized, shaped m × d_2 × … × d_k.
Tensor hogp_posterior_mean(const HogpModel& model, const Matrix& x_test);

/// Unconstrained coordinates used by the optimizer:
/// [log ℓ_1..d, log s, log(σ² − floor), vec(V_2), …] with each latent
/// matrix flattened row-major.
struct HogpLayout {
  Index input_dim = 0;
  Shape output_shape;
  Index latent_dim = 2;

  Index size() const;
  Vector pack(const InputKernelHyper& hyper, const LatentFeatures& latents, double noise_sigma2) const;
  void unpack(const Vector& theta, InputKernelHyper& hyper, LatentFeatures& latents, double& noise_sigma2) const;
};

struct MllValue {
  double value = 0.0;
  Vector gradient;  // with respect to the HogpLayout coordinates
};

/// Log marginal likelihood and its analytic gradient at theta. The
/// gradient uses the per-factor eigendecompositions for both the
/// quadratic term and the log-determinant trace term.
MllValue hogp_mll_with_gradient(const Matrix& train_x, const Vector& standardized_y, const HogpLayout& layout,
                                const Vector& theta);

}  // namespace ktb
