#pragma once

#include <cstdint>

#include "ktb/problem.hpp"
#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace ktb::problems {

/// Dimensions of the synthetic image generator.
struct OpticsShape {
  Index dim = 177;
  Index hidden = 64;
  Index images = 11;
  Index height = 16;
  Index width = 16;

  static OpticsShape full() { return {}; }
  /// Reduced variant for desk-scale runs: 20 inputs, 3 × 8 × 8 images.
  static OpticsShape desk() { return {20, 64, 3, 8, 8}; }
  Index pixels() const { return images * height * width; }
};

/// Fixed two-layer generator z = W₂·tanh(W₁x + b₁) + b₂ with every entry
/// drawn once as N(0, 1/fan_in); pixel = 0.01·sigmoid(z).
class OpticsWorld {
 public:
  OpticsWorld(OpticsShape shape, std::uint64_t world_seed);

  const OpticsShape& shape() const { return shape_; }
  Tensor render(const Vector& x) const;

 private:
  OpticsShape shape_;
  Matrix w1_;
  Vector b1_;
  Matrix w2_;
  Vector b2_;
};

/// Deterministic image stack for design x ∈ [0,1]^dim; entries in (0, 0.01).
Tensor synth_optics(const Vector& x, const OpticsWorld& world);

/// Each pixel p replaced by Binomial(N, 100·p) / (100·N), with the
/// probability clamped to [0, 1].
Tensor binomial_noise(const Tensor& img, std::int64_t n_trials, Rng& rng);

struct OpticsProblemOptions {
  OpticsShape shape = OpticsShape::full();
  std::uint64_t world_seed = 7;
  /// Binomial trials per pixel; 0 disables noise.
  std::int64_t noise_trials = 5000;
  /// H × W efficiency weights; uniform when empty.
  Matrix weights;
};

/// Objectives (efficiency, uniformity), both minimized.
CompositeProblem make_optics_problem(const OpticsProblemOptions& options, std::string name);

}  // namespace ktb::problems
