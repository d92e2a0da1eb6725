#include "ktb/fit.hpp"

#include <cmath>
#include <limits>

#include "ktb/errors.hpp"
#include "ktb/rng.hpp"

namespace ktb {
namespace {

struct Bounds {
  Vector lo;
  Vector hi;
};

Bounds parameter_bounds(const HogpLayout& layout) {
  const Index n = layout.size();
  const Index d = layout.input_dim;
  Bounds b{Vector::Constant(n, -10.0), Vector::Constant(n, 10.0)};
  b.lo.head(d).setConstant(std::log(1e-3));
  b.hi.head(d).setConstant(std::log(1e3));
  b.lo[d] = std::log(1e-4);
  b.hi[d] = std::log(1e4);
  b.lo[d + 1] = std::log(1e-9);
  b.hi[d + 1] = std::log(10.0);
  return b;
}

Vector random_init(const HogpLayout& layout, Rng& rng) {
  const Index d = layout.input_dim;
  Vector theta(layout.size());
  const double base_ls = std::log(0.5 * std::sqrt(static_cast<double>(d)));
  for (Index k = 0; k < d; ++k) theta[k] = base_ls + 0.3 * rng.normal();
  theta[d] = 0.3 * rng.normal();
  theta[d + 1] = std::log(0.1) + 0.3 * rng.normal();
  for (Index i = d + 2; i < theta.size(); ++i) theta[i] = 0.1 * rng.normal();
  return theta;
}

struct AscentResult {
  Vector theta;
  double value = -std::numeric_limits<double>::infinity();
};

// Adam ascent; returns the best iterate seen. A non-finite likelihood ends
// the run.
AscentResult adam_ascent(const Matrix& x, const Vector& y, const HogpLayout& layout, Vector theta,
                         const FitConfig& config, const Bounds& bounds) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  AscentResult best;
  Vector m = Vector::Zero(theta.size());
  Vector v = Vector::Zero(theta.size());
  theta = theta.cwiseMax(bounds.lo).cwiseMin(bounds.hi);
  for (int it = 0; it <= config.max_iters; ++it) {
    MllValue eval;
    try {
      eval = hogp_mll_with_gradient(x, y, layout, theta);
    } catch (const SingularityError&) {
      break;
    }
    if (!std::isfinite(eval.value) || !eval.gradient.allFinite()) break;
    if (eval.value > best.value) {
      best.value = eval.value;
      best.theta = theta;
    }
    if (it == config.max_iters) break;
    const double t = static_cast<double>(it + 1);
    m = beta1 * m + (1.0 - beta1) * eval.gradient;
    v = beta2 * v + (1.0 - beta2) * eval.gradient.cwiseAbs2();
    const Vector m_hat = m / (1.0 - std::pow(beta1, t));
    const Vector v_hat = v / (1.0 - std::pow(beta2, t));
    theta += config.step_size * (m_hat.array() / (v_hat.array().sqrt() + eps)).matrix();
    theta = theta.cwiseMax(bounds.lo).cwiseMin(bounds.hi);
  }
  return best;
}

}  // namespace

HogpModel fit_hogp(const Matrix& train_x, const Tensor& train_y, const FitConfig& config,
                   const std::optional<Vector>& warm_start) {
  if (train_x.rows() < 2) throw InvalidInputError("fit_hogp: needs at least two training points");
  if (train_y.rank() < 1 || train_y.dim(0) != train_x.rows()) throw DimensionError("fit_hogp: train_y shape mismatch");
  if (!train_x.allFinite() || (train_x.array() < 0.0).any() || (train_x.array() > 1.0).any()) {
    throw InvalidInputError("fit_hogp: inputs must lie in the unit cube");
  }
  if (!train_y.all_finite()) throw InvalidInputError("fit_hogp: non-finite outputs");
  if (config.max_iters < 0 || config.restarts < 0 || !(config.step_size > 0.0) || config.latent_dim < 1) {
    throw ConfigError("fit_hogp: invalid FitConfig");
  }

  HogpLayout layout;
  layout.input_dim = train_x.cols();
  layout.output_shape.assign(train_y.shape().begin() + 1, train_y.shape().end());
  layout.latent_dim = config.latent_dim;

  const OutputScaling scaling = OutputScaling::from_data(train_y.data());
  const Vector y = (train_y.data().array() - scaling.mean) / scaling.scale;
  const Bounds bounds = parameter_bounds(layout);

  AscentResult best;
  for (int r = 0; r <= config.restarts; ++r) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(r), 0x68676670ull);
    Vector init = random_init(layout, rng);
    if (r == 0 && warm_start) {
      if (warm_start->size() != layout.size()) throw DimensionError("fit_hogp: warm start length mismatch");
      init = *warm_start;
    }
    AscentResult result = adam_ascent(train_x, y, layout, std::move(init), config, bounds);
    if (result.theta.size() > 0 && result.value > best.value) best = std::move(result);
  }
  if (best.theta.size() == 0) throw FitError("fit_hogp: every restart produced a non-finite likelihood");

  InputKernelHyper hyper;
  LatentFeatures latents;
  double noise = 0.0;
  layout.unpack(best.theta, hyper, latents, noise);
  return HogpModel(train_x, train_y, std::move(hyper), std::move(latents), noise, scaling);
}

Vector hogp_parameters(const HogpModel& model, Index latent_dim) {
  HogpLayout layout;
  layout.input_dim = model.input_dim();
  layout.output_shape = model.output_shape();
  layout.latent_dim = latent_dim;
  return layout.pack(model.hyper(), model.latents(), model.noise_sigma2());
}

}  // namespace ktb
