#include "ktb/problems/optics.hpp"

#include <algorithm>
#include <cmath>

#include "ktb/errors.hpp"
#include "ktb/problems/metrics.hpp"

namespace ktb::problems {
namespace {

Matrix gaussian(Index rows, Index cols, double sd, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = sd * rng.normal();
  }
  return m;
}

}  // namespace

OpticsWorld::OpticsWorld(OpticsShape shape, std::uint64_t world_seed) : shape_(shape) {
  if (shape_.dim < 1 || shape_.hidden < 1 || shape_.pixels() < 1) throw InvalidInputError("OpticsWorld: empty shape");
  Rng rng = Rng::stream(world_seed, 0x0971c5ull);
  const double sd1 = 1.0 / std::sqrt(static_cast<double>(shape_.dim));
  const double sd2 = 1.0 / std::sqrt(static_cast<double>(shape_.hidden));
  w1_ = gaussian(shape_.hidden, shape_.dim, sd1, rng);
  b1_ = gaussian(shape_.hidden, 1, sd1, rng);
  w2_ = gaussian(shape_.pixels(), shape_.hidden, sd2, rng);
  b2_ = gaussian(shape_.pixels(), 1, sd2, rng);
}

Tensor OpticsWorld::render(const Vector& x) const {
  if (x.size() != shape_.dim) throw DimensionError("synth_optics: design has the wrong dimension");
  const Vector h = (w1_ * x + b1_).array().tanh();
  const Vector z = w2_ * h + b2_;
  Vector p = z.unaryExpr([](double v) { return 0.01 / (1.0 + std::exp(-v)); });
  return Tensor(Shape{shape_.images, shape_.height, shape_.width}, std::move(p));
}

Tensor synth_optics(const Vector& x, const OpticsWorld& world) { return world.render(x); }

Tensor binomial_noise(const Tensor& img, std::int64_t n_trials, Rng& rng) {
  if (n_trials < 1) throw InvalidInputError("binomial_noise: n_trials must be positive");
  Tensor out = img;
  const double denom = 100.0 * static_cast<double>(n_trials);
  for (Index i = 0; i < out.size(); ++i) {
    const double prob = std::clamp(100.0 * img[i], 0.0, 1.0);
    out[i] = static_cast<double>(rng.binomial(n_trials, prob)) / denom;
  }
  return out;
}

CompositeProblem make_optics_problem(const OpticsProblemOptions& options, std::string name) {
  OpticsWorld world(options.shape, options.world_seed);
  Matrix weights = options.weights;
  if (weights.size() == 0) weights = Matrix::Ones(options.shape.height, options.shape.width);
  if (weights.rows() != options.shape.height || weights.cols() != options.shape.width) {
    throw DimensionError("make_optics_problem: weight shape mismatch");
  }
  CompositeProblem p;
  p.name = std::move(name);
  p.dim = options.shape.dim;
  p.output_shape = {options.shape.images, options.shape.height, options.shape.width};
  p.n_objectives = 2;
  const std::int64_t trials = options.noise_trials;
  p.simulate = [world, trials](const Vector& x, Rng& rng) {
    Tensor img = world.render(x.cwiseMax(0.0).cwiseMin(1.0));
    return trials > 0 ? binomial_noise(img, trials, rng) : img;
  };
  p.metrics = [weights](const Tensor& stack) { return optics_metrics(stack, weights); };
  return p;
}

}  // namespace ktb::problems
