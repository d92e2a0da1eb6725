#include "ktb/problems/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ktb/errors.hpp"

namespace ktb::problems {
namespace {

void check_stack(const Tensor& stack) {
  if (stack.rank() != 3) throw DimensionError("image stack must be images × height × width");
}

// Percentile of an already sorted sample.
double sorted_percentile(const std::vector<double>& sorted, double q) {
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double lse_aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidInputError("lse_aggregate: no values");
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) throw InvalidInputError("lse_aggregate: non-finite values");
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidInputError("percentile: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_percentile(sorted, q);
}

double efficiency(const Tensor& stack, const Matrix& weights) {
  check_stack(stack);
  if (weights.rows() != stack.dim(1) || weights.cols() != stack.dim(2)) {
    throw DimensionError("efficiency: weight shape mismatch");
  }
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw InvalidInputError("efficiency: weights must have a positive sum");
  const Index h = stack.dim(1);
  const Index w = stack.dim(2);
  std::vector<double> neg_means(static_cast<std::size_t>(stack.dim(0)));
  for (Index k = 0; k < stack.dim(0); ++k) {
    double acc = 0.0;
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) acc += weights(r, c) * stack[(k * h + r) * w + c];
    }
    neg_means[static_cast<std::size_t>(k)] = -acc / wsum;
  }
  return lse_aggregate(neg_means);
}

double uniformity(const Tensor& stack) {
  check_stack(stack);
  const Index pixels = stack.dim(1) * stack.dim(2);
  std::vector<double> ratios(static_cast<std::size_t>(stack.dim(0)));
  std::vector<double> img(static_cast<std::size_t>(pixels));
  for (Index k = 0; k < stack.dim(0); ++k) {
    for (Index i = 0; i < pixels; ++i) img[static_cast<std::size_t>(i)] = std::max(stack[k * pixels + i], 1e-12);
    std::sort(img.begin(), img.end());
    ratios[static_cast<std::size_t>(k)] = sorted_percentile(img, 99.0) / sorted_percentile(img, 1.0);
  }
  return lse_aggregate(ratios);
}

Vector optics_metrics(const Tensor& stack, const Matrix& weights) {
  Vector v(2);
  v << efficiency(stack, weights), uniformity(stack);
  return v;
}

}  // namespace ktb::problems
