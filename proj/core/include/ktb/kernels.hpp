#pragma once

#include <Eigen/Core>

#include "ktb/tensor.hpp"

namespace ktb {

/// ARD Matérn-5/2 hyperparameters over the input space.
struct InputKernelHyper {
  Vector lengthscales;
  double outputscale = 1.0;

  /// Throws InvalidInputError unless every value is finite and positive
  /// and there is one lengthscale per input dimension.
  void validate(Index dim) const;
};

/// outputscale·(1 + √5 r + 5r²/3)·exp(−√5 r), r² = Σ((x_j − x2_j)/ℓ_j)².
double matern52_ard(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                    const InputKernelHyper& hyper);

/// Unit-lengthscale RBF over latent coordinates: exp(−‖v − v2‖²/2).
double latent_kernel(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& v2);

/// Cross-covariance between the rows of a (m × d) and b (n × d).
Matrix matern52_matrix(const Matrix& a, const Matrix& b, const InputKernelHyper& hyper);

/// Symmetric Gram matrix over the rows of x.
Matrix matern52_gram(const Matrix& x, const InputKernelHyper& hyper);

/// Gram matrix of latent_kernel over the rows of v.
Matrix latent_gram(const Matrix& v);

}  // namespace ktb
