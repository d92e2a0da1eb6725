#pragma once

// Dense reference implementations used as test oracles. Everything here is
// deliberately naive: explicit Kronecker products, LDLT solves, full
// covariance matrices.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ktb/hogp.hpp"
#include "ktb/kernels.hpp"
#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace oracle {

using ktb::Index;
using ktb::Matrix;
using ktb::Vector;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Matrix kron_all(const std::vector<Matrix>& fs) {
  Matrix out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = kron(out, fs[i]);
  return out;
}

inline Matrix random_matrix(Index r, Index c, ktb::Rng& rng) {
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  }
  return m;
}

inline Matrix random_symmetric(Index n, ktb::Rng& rng) {
  const Matrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.transpose());
}

/// A·Aᵀ/n + jitter·I: positive definite with moderate conditioning.
inline Matrix random_spd(Index n, ktb::Rng& rng, double jitter = 0.1) {
  const Matrix a = random_matrix(n, n, rng);
  return a * a.transpose() / static_cast<double>(n) + jitter * Matrix::Identity(n, n);
}

inline double mvn_logpdf(const Vector& y, const Matrix& cov) {
  const Eigen::LDLT<Matrix> ldlt(cov);
  const double quad = y.dot(ldlt.solve(y));
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

/// Prior covariance blocks of a HOGP with inputs a, b: K(a,b) ⊗ K_2 ⊗ …
inline Matrix hogp_cov(const ktb::HogpModel& m, const Matrix& a, const Matrix& b) {
  std::vector<Matrix> fs{ktb::matern52_matrix(a, b, m.hyper())};
  for (const auto& v : m.latents().modes) fs.push_back(ktb::latent_gram(v));
  return kron_all(fs);
}

struct DensePosterior {
  Vector mean;  // de-standardized
  Matrix cov;   // de-standardized, latent function (no noise)
};

inline DensePosterior hogp_posterior(const ktb::HogpModel& m, const Matrix& x_test) {
  const Matrix& x = m.train_x();
  Matrix kxx = hogp_cov(m, x, x);
  kxx.diagonal().array() += m.noise_sigma2();
  const Matrix ksx = hogp_cov(m, x_test, x);
  const Matrix kss = hogp_cov(m, x_test, x_test);
  const Eigen::LDLT<Matrix> ldlt(kxx);
  const double s = m.scaling().scale;
  DensePosterior out;
  out.mean = (ksx * ldlt.solve(m.standardized_y())).array() * s + m.scaling().mean;
  out.cov = (kss - ksx * ldlt.solve(ksx.transpose())) * s * s;
  return out;
}

inline double max_rel_err(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace oracle
