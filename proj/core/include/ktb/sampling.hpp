#pragma once

#include <cstdint>
#include <span>

#include "ktb/hogp.hpp"
#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

enum class Precision {
  full64,   ///< every product in 64-bit
  mixed16,  ///< Kronecker MVMs through the half-precision path; roots and solves stay 64-bit
};

struct SampleRequest {
  Matrix x_test;  ///< m × d, unit cube
  Index n_samples = 1;
  Index batch_size = 64;  ///< test points per batch (n′)
  Precision precision = Precision::mixed16;
  std::uint64_t seed = 0;
};

/// k × m × d_2 × … × d_k function values (de-standardized).
struct PosteriorSamples {
  Tensor values;

  Index num_samples() const { return values.dim(0); }
  Index num_points() const { return values.dim(1); }
  /// Draw s as an m × d_2 × … tensor.
  Tensor sample(Index s) const { return values.slice(s); }
  /// Draw s at test point i as a d_2 × … tensor (a scalar tensor of shape
  /// {} is represented as shape {1}).
  Tensor at(Index s, Index i) const;
};

/// (⊗R_i) z with z standard normal, drawn from `rng`.
Vector kron_root_sample(std::span<const Matrix> roots, Rng& rng, Precision precision = Precision::full64);

struct JointPriorDraw {
  Vector f_test;   ///< vec of m × d_2 × …
  Vector f_train;  ///< vec of n × d_2 × …
};

/// Zero-mean draw over the stacked (test, train) inputs with covariance
/// K_joint ⊗ K_2 ⊗ …, in the model's standardized units. Matrix roots are
/// always computed in 64-bit.
JointPriorDraw joint_prior_sample(const HogpModel& model, const Matrix& x_test, Rng& rng,
                                  Precision precision = Precision::full64);

/// Posterior draws by Matheron's rule over all test points at once:
/// f̄ = f_test + (K_{*X} ⊗ K_2 ⊗ …)(K + σ²I)⁻¹(y − f_train − ε).
/// Uses RNG streams (seed, 0, s) for sample s.
PosteriorSamples matheron_sample(const HogpModel& model, const SampleRequest& request);

/// matheron_sample on contiguous batches of batch_size test points with
/// independent prior draws per batch (streams (seed, b, s)). Marginals at
/// each test point are exact; cross-batch correlation is dropped.
PosteriorSamples batched_matheron_sample(const HogpModel& model, const SampleRequest& request);

}  // namespace ktb
