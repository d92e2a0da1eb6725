#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ktb/pareto.hpp"
#include "ktb/sampling.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

/// Closed-form expected improvement for minimization.
double analytic_ei(double mean, double var, double best);

/// Row s of `utilities` holds draw s's utility for each candidate (higher
/// is better). Draw j picks the argmax among candidates not yet picked;
/// ties go to the lowest index. Uses the first q draws.
std::vector<Index> thompson_select(const Matrix& utilities, Index q);

/// Applies `utility` to each draw's tensor at each candidate, then selects
/// as above.
std::vector<Index> thompson_select(const PosteriorSamples& samples,
                                   const std::function<double(const Tensor&)>& utility, Index q);

/// Multi-objective selection. draws[j] is a candidates × 2 matrix of
/// sampled objective values (minimization). Draw j picks the unpicked
/// candidate with the largest hypervolume improvement over `front`, which
/// is then extended with that draw's value so later picks diversify. When
/// no candidate improves, the one closest to being non-dominated is taken.
std::vector<Index> thompson_select_hvi(std::span<const Matrix> draws, const Matrix& front, const Vector& ref,
                                       Index q);

}  // namespace ktb
