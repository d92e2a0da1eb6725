#include "ktb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Eigenvalues>

#include "ktb/errors.hpp"
#include "ktb/half.hpp"
#include "ktb/memory.hpp"

namespace ktb {
namespace {

template <typename Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Multiplies mode `mode` of the row-major tensor `in` (dims) by F (m × n),
// writing into `out`. Row-major (n × post) blocks are column-major
// (post × n) maps, so each block update is a single GEMM with Fᵀ.
template <typename Scalar>
void mode_product(const Scalar* in, Scalar* out, std::span<const Index> dims, Index mode,
                  const DynMatrix<Scalar>& f, bool transpose) {
  Index pre = 1;
  Index post = 1;
  for (Index j = 0; j < mode; ++j) pre *= dims[static_cast<std::size_t>(j)];
  for (Index j = mode + 1; j < static_cast<Index>(dims.size()); ++j) post *= dims[static_cast<std::size_t>(j)];
  const Index n = dims[static_cast<std::size_t>(mode)];
  const Index m = transpose ? f.cols() : f.rows();

  using CMap = Eigen::Map<const DynMatrix<Scalar>>;
  using MMap = Eigen::Map<DynMatrix<Scalar>>;
  if (post == 1) {
    CMap x(in, n, pre);
    MMap y(out, m, pre);
    if (transpose) {
      y.noalias() = f.transpose() * x;
    } else {
      y.noalias() = f * x;
    }
    return;
  }
  for (Index p = 0; p < pre; ++p) {
    CMap x(in + p * n * post, post, n);
    MMap y(out + p * m * post, post, m);
    if (transpose) {
      y.noalias() = x * f;
    } else {
      y.noalias() = x * f.transpose();
    }
  }
}

Index out_rows(const Matrix& f, bool transpose) { return transpose ? f.cols() : f.rows(); }
Index in_cols(const Matrix& f, bool transpose) { return transpose ? f.rows() : f.cols(); }

Vector apply_modes(std::span<const Matrix* const> factors, const Vector& v, bool transpose) {
  if (factors.empty()) throw DimensionError("Kronecker product needs at least one factor");
  Shape dims;
  Index expected = 1;
  Index peak = 1;
  Index running = 1;
  for (const Matrix* f : factors) {
    dims.push_back(in_cols(*f, transpose));
    expected *= in_cols(*f, transpose);
  }
  if (v.size() != expected) {
    throw DimensionError("Kronecker MVM: vector length " + std::to_string(v.size()) + " != " +
                         std::to_string(expected));
  }
  running = expected;
  peak = expected;
  for (const Matrix* f : factors) {
    running = running / in_cols(*f, transpose) * out_rows(*f, transpose);
    peak = std::max(peak, running);
  }

  memory::ScopedBytes tracked(2 * static_cast<std::size_t>(peak) * sizeof(double));
  Vector a(peak);
  Vector b(peak);
  a.head(v.size()) = v;
  Index len = v.size();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Matrix& f = *factors[i];
    mode_product<double>(a.data(), b.data(), dims, static_cast<Index>(i), f, transpose);
    len = len / dims[i] * out_rows(f, transpose);
    dims[i] = out_rows(f, transpose);
    a.swap(b);
  }
  return a.head(len);
}

std::vector<const Matrix*> pointers(std::span<const Matrix> factors) {
  std::vector<const Matrix*> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(&f);
  return out;
}

std::vector<const Matrix*> pointers(const KronOperator& op) {
  std::vector<const Matrix*> out;
  for (const auto& f : op.factors()) out.push_back(&f.matrix());
  return out;
}

std::vector<EigenPair> factor_eigs(const KronOperator& op) {
  std::vector<EigenPair> eigs;
  eigs.reserve(op.factors().size());
  for (const auto& f : op.factors()) eigs.push_back(sym_eig(f));
  return eigs;
}

double clamp_zero(double lambda) { return lambda < kEigClamp ? 0.0 : lambda; }

float max_abs(const float* p, Index n) {
  float m = 0.0f;
  for (Index i = 0; i < n; ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("SymMatrix must be square");
  if (!m_.allFinite()) throw InvalidInputError("SymMatrix has non-finite entries");
  const double scale = m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0;
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300) && m_.size() > 0) {
    throw InvalidInputError("SymMatrix is not symmetric");
  }
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

KronOperator::KronOperator(std::vector<SymMatrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionError("KronOperator needs at least one factor");
  total_dim_ = 1;
  for (const auto& f : factors_) total_dim_ *= f.order();
}

Matrix KronOperator::to_dense() const {
  Matrix out = factors_.front().matrix();
  for (std::size_t i = 1; i < factors_.size(); ++i) {
    const Matrix& f = factors_[i].matrix();
    Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Index r = 0; r < out.rows(); ++r) {
      for (Index c = 0; c < out.cols(); ++c) {
        next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
      }
    }
    out = std::move(next);
  }
  return out;
}

Vector kron_apply(std::span<const Matrix> factors, const Vector& v) {
  return apply_modes(pointers(factors), v, false);
}

Vector kron_apply_transposed(std::span<const Matrix> factors, const Vector& v) {
  return apply_modes(pointers(factors), v, true);
}

Vector kron_mvm(const KronOperator& op, const Vector& v) { return apply_modes(pointers(op), v, false); }

EigenPair sym_eig(const SymMatrix& a) {
  const Matrix& m = a.matrix();
  if (!m.allFinite()) throw InvalidInputError("sym_eig: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw InvalidInputError("sym_eig: eigensolver did not converge");
  const Index n = m.rows();
  EigenPair out{Matrix(n, n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    out.q.col(i) = solver.eigenvectors().col(n - 1 - i);
    out.lambda[i] = solver.eigenvalues()[n - 1 - i];
  }
  return out;
}

Vector kron_joint_eigenvalues(std::span<const Vector> factor_eigs) {
  Vector joint = Vector::Ones(1);
  for (const auto& lam : factor_eigs) {
    Vector next(joint.size() * lam.size());
    for (Index i = 0; i < joint.size(); ++i) {
      for (Index j = 0; j < lam.size(); ++j) next[i * lam.size() + j] = joint[i] * clamp_zero(lam[j]);
    }
    joint = std::move(next);
  }
  return joint;
}

Vector kron_eig_solve(std::span<const EigenPair> eigs, double sigma2, const Vector& v) {
  if (sigma2 < 0.0 || !std::isfinite(sigma2)) throw InvalidInputError("kron_eig_solve: sigma2 must be >= 0");
  std::vector<const Matrix*> qs;
  std::vector<Vector> lams;
  for (const auto& e : eigs) {
    qs.push_back(&e.q);
    lams.push_back(e.lambda);
  }
  Vector t = apply_modes(qs, v, true);
  const Vector joint = kron_joint_eigenvalues(lams);
  for (Index i = 0; i < t.size(); ++i) {
    const double den = joint[i] + sigma2;
    if (!(den > 0.0)) throw SingularityError("kron_eig_solve: singular system");
    t[i] /= den;
  }
  return apply_modes(qs, t, false);
}

Vector kron_eig_solve(const KronOperator& op, double sigma2, const Vector& v) {
  if (v.size() != op.total_dim()) throw DimensionError("kron_eig_solve: vector length mismatch");
  const auto eigs = factor_eigs(op);
  return kron_eig_solve(eigs, sigma2, v);
}

Matrix matrix_root(const EigenPair& eig, double clamp_eps) {
  const Vector s = eig.lambda.cwiseMax(clamp_eps).cwiseSqrt();
  Matrix r = eig.q * s.asDiagonal() * eig.q.transpose();
  return 0.5 * (r + r.transpose());
}

SymMatrix matrix_root(const SymMatrix& a, double clamp_eps) {
  if (!(clamp_eps > 0.0)) throw InvalidInputError("matrix_root: clamp_eps must be positive");
  return SymMatrix(matrix_root(sym_eig(a), clamp_eps));
}

double kron_logdet(std::span<const Vector> factor_eigs, double sigma2) {
  if (sigma2 < 0.0 || !std::isfinite(sigma2)) throw InvalidInputError("kron_logdet: sigma2 must be >= 0");
  const Vector joint = kron_joint_eigenvalues(factor_eigs);
  double acc = 0.0;
  for (Index i = 0; i < joint.size(); ++i) {
    const double x = joint[i] + sigma2;
    if (!(x > 0.0)) throw SingularityError("kron_logdet: log of a nonpositive value");
    acc += std::log(x);
  }
  return acc;
}

HalfKronFactors quantize_factors(std::span<const Matrix> factors) {
  if (factors.empty()) throw DimensionError("Kronecker product needs at least one factor");
  HalfKronFactors out;
  out.scale = 1.0;
  out.factors.reserve(factors.size());
  for (const auto& f : factors) {
    if (!f.allFinite()) throw PrecisionOverflowError("reduced_precision_mvm: non-finite factor");
    const double s = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    if (s == 0.0) {
      out.factors.push_back(Eigen::MatrixXf::Zero(f.rows(), f.cols()));
      out.scale = 0.0;
      continue;
    }
    out.factors.push_back((f / s).cast<float>().unaryExpr([](float x) { return half::round(x); }));
    out.scale *= s;
  }
  return out;
}

Vector reduced_precision_apply(const HalfKronFactors& q, const Vector& v) {
  if (q.factors.empty()) throw DimensionError("Kronecker product needs at least one factor");
  Shape dims;
  Index expected = 1;
  Index out_len = 1;
  for (const auto& f : q.factors) {
    dims.push_back(f.cols());
    expected *= f.cols();
    out_len *= f.rows();
  }
  if (v.size() != expected) throw DimensionError("reduced_precision_mvm: vector length mismatch");
  if (!v.allFinite()) throw PrecisionOverflowError("reduced_precision_mvm: non-finite input vector");
  if (q.scale == 0.0) return Vector::Zero(out_len);

  const double sv = v.cwiseAbs().maxCoeff();
  if (sv == 0.0) return Vector::Zero(out_len);
  double scale = q.scale * sv;

  Index peak = expected;
  Index running = expected;
  for (const auto& f : q.factors) {
    running = running / f.cols() * f.rows();
    peak = std::max(peak, running);
  }
  // Intermediates live in half storage; the float scratch holds one mode
  // product while it is accumulated.
  memory::ScopedBytes tracked(static_cast<std::size_t>(peak) * (sizeof(std::uint16_t) + 2 * sizeof(float)));
  std::vector<std::uint16_t> stored(static_cast<std::size_t>(peak));
  Eigen::VectorXf in(peak);
  Eigen::VectorXf out(peak);
  const double inv_sv = 1.0 / sv;
  for (Index i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv_sv);
  half::to_bits(out.data(), stored.data(), static_cast<std::size_t>(expected));

  Index len = expected;
  for (std::size_t i = 0; i < q.factors.size(); ++i) {
    half::from_bits(stored.data(), in.data(), static_cast<std::size_t>(len));
    mode_product<float>(in.data(), out.data(), dims, static_cast<Index>(i), q.factors[i], false);
    len = len / dims[i] * q.factors[i].rows();
    dims[i] = q.factors[i].rows();
    const float t = max_abs(out.data(), len);
    if (!std::isfinite(t)) throw PrecisionOverflowError("reduced_precision_mvm: overflow in accumulation");
    if (t == 0.0f) return Vector::Zero(out_len);
    const float inv = 1.0f / t;
    for (Index j = 0; j < len; ++j) out[j] *= inv;
    half::to_bits(out.data(), stored.data(), static_cast<std::size_t>(len));
    scale *= static_cast<double>(t);
  }

  half::from_bits(stored.data(), in.data(), static_cast<std::size_t>(len));
  Vector result = in.head(len).cast<double>() * scale;
  if (!result.allFinite()) throw PrecisionOverflowError("reduced_precision_mvm: result overflow");
  return result;
}

Vector reduced_precision_apply(std::span<const Matrix> factors, const Vector& v) {
  if (factors.empty()) throw DimensionError("Kronecker product needs at least one factor");
  Index expected = 1;
  for (const auto& f : factors) expected *= f.cols();
  if (v.size() != expected) throw DimensionError("reduced_precision_mvm: vector length mismatch");
  return reduced_precision_apply(quantize_factors(factors), v);
}

Vector reduced_precision_mvm(const KronOperator& op, const Vector& v) {
  std::vector<Matrix> fs;
  fs.reserve(op.factors().size());
  for (const auto& f : op.factors()) fs.push_back(f.matrix());
  return reduced_precision_apply(fs, v);
}

Vector mode_apply(std::span<const Index> shape, Index mode, const Matrix& f, const Vector& v) {
  if (shape_size(shape) != v.size() || f.cols() != shape[static_cast<std::size_t>(mode)]) {
    throw DimensionError("mode_apply: shape mismatch");
  }
  Vector out(v.size() / f.cols() * f.rows());
  mode_product<double>(v.data(), out.data(), shape, mode, f, false);
  return out;
}

Matrix mode_gram(std::span<const Index> shape, Index mode, const Vector& a, const Vector& b) {
  Index pre = 1;
  Index post = 1;
  for (Index j = 0; j < mode; ++j) pre *= shape[static_cast<std::size_t>(j)];
  for (Index j = mode + 1; j < static_cast<Index>(shape.size()); ++j) post *= shape[static_cast<std::size_t>(j)];
  const Index n = shape[static_cast<std::size_t>(mode)];
  if (a.size() != pre * n * post || b.size() != a.size()) throw DimensionError("mode_gram: length mismatch");

  using CMap = Eigen::Map<const Matrix>;
  if (post == 1) {
    CMap x(a.data(), n, pre);
    CMap y(b.data(), n, pre);
    return x * y.transpose();
  }
  Matrix m = Matrix::Zero(n, n);
  for (Index p = 0; p < pre; ++p) {
    CMap x(a.data() + p * n * post, post, n);
    CMap y(b.data() + p * n * post, post, n);
    m.noalias() += x.transpose() * y;
  }
  return m;
}

}  // namespace ktb
