#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

/// An objective g(h(x)) over the unit cube: `simulate` is the expensive
/// tensor-valued map h (it may inject noise through the supplied stream)
/// and `metrics` is the cheap deterministic g. Every metric is minimized.
struct CompositeProblem {
  std::string name;
  Index dim = 0;
  Shape output_shape;
  Index n_objectives = 1;
  std::function<Tensor(const Vector& x, Rng& rng)> simulate;
  std::function<Vector(const Tensor& output)> metrics;
  /// Hypervolume reference point; derived from the initial design when unset.
  std::optional<Vector> ref_point;

  Vector evaluate(const Vector& x, Rng& rng) const { return metrics(simulate(x, rng)); }
};

}  // namespace ktb
