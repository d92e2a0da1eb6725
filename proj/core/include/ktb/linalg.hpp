#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ktb/tensor.hpp"

namespace ktb {

/// Eigenvalues below this (absolute) are treated as roundoff on PSD input.
inline constexpr double kEigClamp = 1e-10;

/// Dense symmetric matrix. Construction checks finiteness and symmetry to
/// 1e-12 relative to the largest entry.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m);

  static SymMatrix identity(Index n);

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Orthonormal eigenvectors (columns of q) with eigenvalues in descending
/// order.
struct EigenPair {
  Matrix q;
  Vector lambda;
};

/// K_1 ⊗ K_2 ⊗ … ⊗ K_m over symmetric factors. The first factor indexes
/// data points; later factors index output modes in tensor order.
class KronOperator {
 public:
  explicit KronOperator(std::vector<SymMatrix> factors);

  const std::vector<SymMatrix>& factors() const { return factors_; }
  Index num_factors() const { return static_cast<Index>(factors_.size()); }
  Index total_dim() const { return total_dim_; }

  /// Dense product. Test oracle only; O(total_dim²) memory.
  Matrix to_dense() const;

 private:
  std::vector<SymMatrix> factors_;
  Index total_dim_ = 0;
};

/// (⊗ F_i) v for rectangular factors F_i (m_i × n_i), with v of length
/// ∏n_i. Applies one mode at a time on the reshaped tensor; the dense
/// product is never formed.
Vector kron_apply(std::span<const Matrix> factors, const Vector& v);

/// Same as kron_apply, but multiplies by the transposed factors.
Vector kron_apply_transposed(std::span<const Matrix> factors, const Vector& v);

Vector kron_mvm(const KronOperator& op, const Vector& v);

EigenPair sym_eig(const SymMatrix& a);

/// ((⊗K_i) + σ²I)⁻¹ v through per-factor eigendecompositions. Eigenvalues
/// are clamped at zero before forming the joint spectrum.
Vector kron_eig_solve(const KronOperator& op, double sigma2, const Vector& v);
Vector kron_eig_solve(std::span<const EigenPair> eigs, double sigma2, const Vector& v);

/// Joint spectrum ∏λ_i (row-major over factor indices, clamped at zero).
Vector kron_joint_eigenvalues(std::span<const Vector> factor_eigs);

/// Symmetric square root Q·diag(max(λ, clamp_eps))^{1/2}·Qᵀ in 64-bit.
SymMatrix matrix_root(const SymMatrix& a, double clamp_eps = kEigClamp);
Matrix matrix_root(const EigenPair& eig, double clamp_eps = kEigClamp);

/// Σ log(∏λ_i + σ²) over all joint index tuples.
double kron_logdet(std::span<const Vector> factor_eigs, double sigma2);

/// kron_mvm with factor entries and every intermediate stored as IEEE half
/// values. Each factor and each intermediate is divided by its max-abs
/// entry before rounding; inner products accumulate in 32-bit floats and
/// the scales are restored in 64-bit at the end.
Vector reduced_precision_mvm(const KronOperator& op, const Vector& v);
Vector reduced_precision_apply(std::span<const Matrix> factors, const Vector& v);

/// Factors already divided by their max-abs entry and rounded to half, for
/// repeated reduced-precision products with the same operator.
struct HalfKronFactors {
  std::vector<Eigen::MatrixXf> factors;
  double scale = 0.0;  ///< product of the per-factor max-abs entries
};
HalfKronFactors quantize_factors(std::span<const Matrix> factors);
/// Bitwise identical to reduced_precision_apply on the original factors.
Vector reduced_precision_apply(const HalfKronFactors& factors, const Vector& v);

/// Multiplies a single mode of the row-major tensor v (dims `shape`) by f.
Vector mode_apply(std::span<const Index> shape, Index mode, const Matrix& f, const Vector& v);

/// Mode-i unfolding product: M[a, b] = Σ_rest A[…a…]·B[…b…] for two
/// tensors of the same shape.
Matrix mode_gram(std::span<const Index> shape, Index mode, const Vector& a, const Vector& b);

}  // namespace ktb
