#include "ktb/hogp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ktb/errors.hpp"

namespace ktb {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;

double clamp_eig(double lambda) { return lambda < kEigClamp ? 0.0 : lambda; }

void check_inputs(const Matrix& x, const Shape& joint_shape) {
  if (joint_shape.empty() || joint_shape.front() != x.rows()) {
    throw DimensionError("HOGP: train_y leading dimension must equal the number of training inputs");
  }
  if (x.rows() < 1) throw InvalidInputError("HOGP: needs at least one training point");
  if (!x.allFinite()) throw InvalidInputError("HOGP: non-finite training inputs");
}

std::vector<Matrix> build_factors(const Matrix& x, const InputKernelHyper& hyper, const LatentFeatures& latents) {
  std::vector<Matrix> factors;
  factors.reserve(latents.modes.size() + 1);
  factors.push_back(matern52_gram(x, hyper));
  for (const auto& v : latents.modes) factors.push_back(latent_gram(v));
  return factors;
}

std::vector<EigenPair> decompose(const std::vector<Matrix>& factors) {
  std::vector<EigenPair> eigs;
  eigs.reserve(factors.size());
  for (const auto& f : factors) eigs.push_back(sym_eig(SymMatrix(f)));
  return eigs;
}

std::vector<Vector> eigenvalues(const std::vector<EigenPair>& eigs) {
  std::vector<Vector> lams;
  lams.reserve(eigs.size());
  for (const auto& e : eigs) lams.push_back(e.lambda);
  return lams;
}

// w_i[a] = Σ_{J : J_i = a} (∏_{j≠i} λ_j[J_j]) / (λ_J + σ²): the diagonal
// weights of the trace term tr(C⁻¹ ∂C) in factor i's eigenbasis.
std::vector<Vector> trace_weights(const std::vector<Vector>& lams, const Vector& inv_den) {
  const std::size_t m = lams.size();
  std::vector<Vector> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = Vector::Zero(lams[i].size());
  std::vector<Index> idx(m, 0);
  std::vector<double> prefix(m + 1), suffix(m + 1);
  for (Index flat = 0; flat < inv_den.size(); ++flat) {
    prefix[0] = 1.0;
    for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] * clamp_eig(lams[j][idx[j]]);
    suffix[m] = 1.0;
    for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] * clamp_eig(lams[j][idx[j]]);
    for (std::size_t i = 0; i < m; ++i) w[i][idx[i]] += prefix[i] * suffix[i + 1] * inv_den[flat];
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] < lams[j].size()) break;
      idx[j] = 0;
    }
  }
  return w;
}

}  // namespace

OutputScaling OutputScaling::from_data(const Vector& y) {
  OutputScaling s;
  if (y.size() == 0) return s;
  s.mean = y.mean();
  const double var = y.size() > 1 ? (y.array() - s.mean).square().sum() / static_cast<double>(y.size() - 1) : 0.0;
  const double sd = std::sqrt(var);
  s.scale = (sd > 1e-12 * std::max(1.0, std::abs(s.mean))) ? sd : 1.0;
  return s;
}

HogpModel::HogpModel(Matrix train_x, Tensor train_y, InputKernelHyper hyper, LatentFeatures latents,
                     double noise_sigma2, OutputScaling scaling)
    : train_x_(std::move(train_x)),
      train_y_(std::move(train_y)),
      hyper_(std::move(hyper)),
      latents_(std::move(latents)),
      noise_(noise_sigma2),
      scaling_(scaling) {
  check_inputs(train_x_, train_y_.shape());
  hyper_.validate(train_x_.cols());
  if (static_cast<Index>(latents_.modes.size()) + 1 != train_y_.rank()) {
    throw DimensionError("HOGP: need one latent matrix per output mode");
  }
  for (std::size_t j = 0; j < latents_.modes.size(); ++j) {
    if (latents_.modes[j].rows() != train_y_.dim(static_cast<Index>(j) + 1)) {
      throw DimensionError("HOGP: latent matrix rows must equal the output mode size");
    }
    if (!latents_.modes[j].allFinite()) throw InvalidInputError("HOGP: non-finite latent features");
  }
  if (!std::isfinite(noise_) || noise_ < 0.0) throw InvalidInputError("HOGP: noise variance must be >= 0");
  if (!train_y_.all_finite()) throw InvalidInputError("HOGP: non-finite training outputs");
  if (!(scaling_.scale > 0.0)) throw InvalidInputError("HOGP: output scale must be positive");

  y_std_ = (train_y_.data().array() - scaling_.mean) / scaling_.scale;
  factors_ = build_factors(train_x_, hyper_, latents_);
  eigs_ = decompose(factors_);
  alpha_ = kron_eig_solve(eigs_, noise_, y_std_);
}

Shape HogpModel::output_shape() const { return Shape(train_y_.shape().begin() + 1, train_y_.shape().end()); }

Index HogpModel::output_size() const { return train_y_.size() / std::max<Index>(num_train(), 1); }

Matrix HogpModel::cross_kernel(const Matrix& x_test) const {
  if (x_test.cols() != input_dim()) throw DimensionError("HOGP: test input dimension mismatch");
  return matern52_matrix(x_test, train_x_, hyper_);
}

double hogp_mll(const HogpModel& model) {
  const auto lams = eigenvalues(model.eigs());
  const double logdet = kron_logdet(lams, model.noise_sigma2());
  const double quad = model.standardized_y().dot(model.alpha());
  const auto n = static_cast<double>(model.standardized_y().size());
  return -0.5 * quad - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Tensor hogp_posterior_mean(const HogpModel& model, const Matrix& x_test) {
  std::vector<Matrix> factors = model.factors();
  factors.front() = model.cross_kernel(x_test);
  Vector mean = kron_apply(factors, model.alpha());
  mean = (mean.array() * model.scaling().scale + model.scaling().mean).matrix();
  Shape shape = model.joint_shape();
  shape.front() = x_test.rows();
  return Tensor(std::move(shape), std::move(mean));
}

Index HogpLayout::size() const {
  Index n = input_dim + 2;
  for (Index d : output_shape) n += d * latent_dim;
  return n;
}

Vector HogpLayout::pack(const InputKernelHyper& hyper, const LatentFeatures& latents, double noise_sigma2) const {
  Vector theta(size());
  theta.head(input_dim) = hyper.lengthscales.array().log();
  theta[input_dim] = std::log(hyper.outputscale);
  theta[input_dim + 1] = std::log(std::max(noise_sigma2 - kNoiseFloor, 1e-12));
  Index off = input_dim + 2;
  for (std::size_t j = 0; j < output_shape.size(); ++j) {
    const Matrix& v = latents.modes[j];
    for (Index a = 0; a < v.rows(); ++a) {
      for (Index c = 0; c < v.cols(); ++c) theta[off++] = v(a, c);
    }
  }
  return theta;
}

void HogpLayout::unpack(const Vector& theta, InputKernelHyper& hyper, LatentFeatures& latents,
                        double& noise_sigma2) const {
  if (theta.size() != size()) throw DimensionError("HogpLayout: parameter vector length mismatch");
  hyper.lengthscales = theta.head(input_dim).array().exp();
  hyper.outputscale = std::exp(theta[input_dim]);
  noise_sigma2 = kNoiseFloor + std::exp(theta[input_dim + 1]);
  latents.modes.assign(output_shape.size(), Matrix());
  Index off = input_dim + 2;
  for (std::size_t j = 0; j < output_shape.size(); ++j) {
    Matrix v(output_shape[j], latent_dim);
    for (Index a = 0; a < v.rows(); ++a) {
      for (Index c = 0; c < v.cols(); ++c) v(a, c) = theta[off++];
    }
    latents.modes[j] = std::move(v);
  }
}

MllValue hogp_mll_with_gradient(const Matrix& train_x, const Vector& y, const HogpLayout& layout,
                                const Vector& theta) {
  InputKernelHyper hyper;
  LatentFeatures latents;
  double noise = 0.0;
  layout.unpack(theta, hyper, latents, noise);

  Shape shape{train_x.rows()};
  shape.insert(shape.end(), layout.output_shape.begin(), layout.output_shape.end());
  if (shape_size(shape) != y.size()) throw DimensionError("hogp_mll_with_gradient: output length mismatch");

  const std::vector<Matrix> factors = build_factors(train_x, hyper, latents);
  const std::vector<EigenPair> eigs = decompose(factors);
  const std::vector<Vector> lams = eigenvalues(eigs);

  const Vector joint = kron_joint_eigenvalues(lams);
  const Vector den = joint.array() + noise;
  if ((den.array() <= 0.0).any()) throw SingularityError("hogp_mll_with_gradient: singular covariance");
  const Vector inv_den = den.cwiseInverse();
  const Vector alpha = kron_eig_solve(eigs, noise, y);

  MllValue out;
  const auto n_total = static_cast<double>(y.size());
  out.value = -0.5 * y.dot(alpha) - 0.5 * den.array().log().sum() - 0.5 * n_total * std::log(2.0 * std::numbers::pi);
  out.gradient = Vector::Zero(layout.size());

  const std::vector<Vector> w = trace_weights(lams, inv_den);
  const auto n_factors = static_cast<Index>(factors.size());
  std::vector<Matrix> grads(factors.size());  // ∂mll/∂K_i, symmetric
  for (Index i = 0; i < n_factors; ++i) {
    Vector b = alpha;
    for (Index j = 0; j < n_factors; ++j) {
      if (j != i) b = mode_apply(shape, j, factors[static_cast<std::size_t>(j)], b);
    }
    const Matrix m = mode_gram(shape, i, alpha, b);
    const EigenPair& e = eigs[static_cast<std::size_t>(i)];
    const Matrix trace = e.q * w[static_cast<std::size_t>(i)].asDiagonal() * e.q.transpose();
    grads[static_cast<std::size_t>(i)] = 0.25 * (m + m.transpose()) - 0.5 * trace;
  }

  // Input kernel: ∂K/∂log s = K; ∂K/∂log ℓ_k = s·(5/3)(1+√5r)e^{−√5r}·(Δ_k/ℓ_k)².
  const Index d = layout.input_dim;
  const Matrix& g0 = grads.front();
  out.gradient[d] = g0.cwiseProduct(factors.front()).sum();
  {
    const Matrix xs = train_x * hyper.lengthscales.cwiseInverse().asDiagonal();
    Matrix d2 = (-2.0 * xs * xs.transpose()).eval();
    d2.colwise() += xs.rowwise().squaredNorm();
    d2.rowwise() += xs.rowwise().squaredNorm().transpose();
    const Matrix h = g0.cwiseProduct(d2.unaryExpr([&](double v) {
      const double r = std::sqrt(std::max(v, 0.0));
      return hyper.outputscale * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    }));
    const Vector rowsum = h.rowwise().sum();
    const Matrix hx = h * xs;
    for (Index k = 0; k < d; ++k) {
      out.gradient[k] = 2.0 * (rowsum.dot(xs.col(k).cwiseAbs2()) - xs.col(k).dot(hx.col(k)));
    }
  }

  // Noise: σ² = floor + e^θ.
  out.gradient[d + 1] = (noise - kNoiseFloor) * (0.5 * alpha.squaredNorm() - 0.5 * inv_den.sum());

  // Latents: ∂K[a,b]/∂v_a = −K[a,b](v_a − v_b).
  Index off = d + 2;
  for (std::size_t j = 0; j < latents.modes.size(); ++j) {
    const Matrix& v = latents.modes[j];
    const Matrix p = grads[j + 1].cwiseProduct(factors[j + 1]);
    const Matrix gv = 2.0 * (p * v - p.rowwise().sum().asDiagonal() * v);
    for (Index a = 0; a < v.rows(); ++a) {
      for (Index c = 0; c < v.cols(); ++c) out.gradient[off++] = gv(a, c);
    }
  }
  return out;
}

}  // namespace ktb
