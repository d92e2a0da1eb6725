#include "ktb/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ktb/errors.hpp"

namespace ktb {

double analytic_ei(double mean, double var, double best) {
  if (var < 0.0) throw InvalidInputError("analytic_ei: negative variance");
  const double improvement = best - mean;
  if (var == 0.0) return std::max(improvement, 0.0);
  const double sd = std::sqrt(var);
  const double z = improvement / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(improvement * cdf + sd * pdf, 0.0);
}

std::vector<Index> thompson_select(const Matrix& utilities, Index q) {
  const Index n = utilities.cols();
  if (q > n) throw InvalidInputError("thompson_select: q exceeds the number of candidates");
  if (q > utilities.rows()) throw InvalidInputError("thompson_select: fewer draws than picks");
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(q));
  for (Index j = 0; j < q; ++j) {
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || utilities(j, i) > utilities(j, best)) best = i;
    }
    taken[static_cast<std::size_t>(best)] = true;
    picks.push_back(best);
  }
  return picks;
}

std::vector<Index> thompson_select(const PosteriorSamples& samples,
                                   const std::function<double(const Tensor&)>& utility, Index q) {
  const Index k = samples.num_samples();
  const Index m = samples.num_points();
  Matrix u(k, m);
  for (Index s = 0; s < k; ++s) {
    for (Index i = 0; i < m; ++i) u(s, i) = utility(samples.at(s, i));
  }
  return thompson_select(u, q);
}

std::vector<Index> thompson_select_hvi(std::span<const Matrix> draws, const Matrix& front, const Vector& ref,
                                       Index q) {
  if (draws.empty()) throw InvalidInputError("thompson_select_hvi: no draws");
  const Index n = draws.front().rows();
  if (q > n) throw InvalidInputError("thompson_select_hvi: q exceeds the number of candidates");
  if (q > static_cast<Index>(draws.size())) throw InvalidInputError("thompson_select_hvi: fewer draws than picks");
  HypervolumeFront hv(front, ref);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<Index> picks;
  for (Index j = 0; j < q; ++j) {
    const Matrix& f = draws[static_cast<std::size_t>(j)];
    if (f.rows() != n || f.cols() != 2) throw DimensionError("thompson_select_hvi: draw shape mismatch");
    Index best = -1;
    double best_hvi = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double hvi = hv.improvement(f.row(i).transpose());
      if (hvi > best_hvi) {
        best_hvi = hvi;
        best = i;
      }
    }
    if (best < 0) {
      double closest = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const double gap = hv.shortfall(f.row(i).transpose());
        if (best < 0 || gap < closest) {
          closest = gap;
          best = i;
        }
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    picks.push_back(best);
    hv.insert(f.row(best).transpose());
  }
  return picks;
}

}  // namespace ktb
