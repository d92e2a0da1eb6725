#pragma once

#include <span>

#include "ktb/tensor.hpp"

namespace ktb::problems {

/// log Σ exp(v_i), evaluated with the maximum subtracted first.
double lse_aggregate(std::span<const double> values);

/// Percentile with linear interpolation between order statistics
/// (position q/100·(n−1) in the sorted sample).
double percentile(std::span<const double> values, double q);

/// Per image, the weighted mean brightness; the negated means are then
/// combined by lse_aggregate. Lower is brighter. `weights` is H × W.
double efficiency(const Tensor& stack, const Matrix& weights);

/// Per image, P99 / P1 of the pixels (floored at 1e-12), combined across
/// images by lse_aggregate. Lower is more uniform.
double uniformity(const Tensor& stack);

/// Both metrics as a 2-vector (efficiency, uniformity).
Vector optics_metrics(const Tensor& stack, const Matrix& weights);

}  // namespace ktb::problems
