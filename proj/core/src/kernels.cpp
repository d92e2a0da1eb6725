#include "ktb/kernels.hpp"

#include <cmath>

#include "ktb/errors.hpp"

namespace ktb {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;

double matern_profile(double r) { return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r); }

Matrix scaled_sq_dist(const Matrix& a, const Matrix& b, const Vector& lengthscales) {
  const Matrix sa = a * lengthscales.cwiseInverse().asDiagonal();
  const Matrix sb = b * lengthscales.cwiseInverse().asDiagonal();
  Matrix d2 = (-2.0 * sa * sb.transpose()).eval();
  d2.colwise() += sa.rowwise().squaredNorm();
  d2.rowwise() += sb.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

}  // namespace

void InputKernelHyper::validate(Index dim) const {
  if (lengthscales.size() != dim) {
    throw DimensionError("kernel has " + std::to_string(lengthscales.size()) + " lengthscales for " +
                         std::to_string(dim) + " input dimensions");
  }
  if (!lengthscales.allFinite() || (lengthscales.array() <= 0.0).any()) {
    throw InvalidInputError("lengthscales must be finite and positive");
  }
  if (!std::isfinite(outputscale) || outputscale <= 0.0) throw InvalidInputError("outputscale must be positive");
}

double matern52_ard(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                    const InputKernelHyper& hyper) {
  if (x.size() != x2.size() || x.size() != hyper.lengthscales.size()) {
    throw DimensionError("matern52_ard: dimension mismatch");
  }
  const double r = ((x - x2).array() / hyper.lengthscales.array()).matrix().norm();
  return hyper.outputscale * matern_profile(r);
}

double latent_kernel(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& v2) {
  if (v.size() != v2.size()) throw DimensionError("latent_kernel: dimension mismatch");
  return std::exp(-0.5 * (v - v2).squaredNorm());
}

Matrix matern52_matrix(const Matrix& a, const Matrix& b, const InputKernelHyper& hyper) {
  if (a.cols() != b.cols() || a.cols() != hyper.lengthscales.size()) {
    throw DimensionError("matern52_matrix: dimension mismatch");
  }
  return scaled_sq_dist(a, b, hyper.lengthscales).unaryExpr([&](double d2) {
    return hyper.outputscale * matern_profile(std::sqrt(d2));
  });
}

Matrix matern52_gram(const Matrix& x, const InputKernelHyper& hyper) {
  Matrix k = matern52_matrix(x, x, hyper);
  k.diagonal().setConstant(hyper.outputscale);
  return 0.5 * (k + k.transpose());
}

Matrix latent_gram(const Matrix& v) {
  const Index n = v.rows();
  Matrix k(n, n);
  for (Index a = 0; a < n; ++a) {
    k(a, a) = 1.0;
    for (Index b = 0; b < a; ++b) {
      k(a, b) = k(b, a) = std::exp(-0.5 * (v.row(a) - v.row(b)).squaredNorm());
    }
  }
  return k;
}

}  // namespace ktb
