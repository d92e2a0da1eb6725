#pragma once

#include <cstdint>

#include "ktb/problem.hpp"
#include "ktb/tensor.hpp"

namespace ktb::problems {

inline constexpr Index kTowers = 15;
inline constexpr Index kCoverageGrid = 50;

/// Frozen tower layout for one synthetic coverage instance.
class CoverageWorld {
 public:
  explicit CoverageWorld(std::uint64_t world_seed);

  /// 15 × 2 positions in the unit square.
  const Matrix& tower_positions() const { return positions_; }

 private:
  Matrix positions_;
};

/// Two 50 × 50 channels over cell centers ((c+½)/50, (r+½)/50). Tower i
/// (power p[2i], tilt p[2i+1]) contributes p·exp(−‖c − pos‖²/(0.02 + 0.2·tilt²));
/// channel 0 is the strongest signal, channel 1 the sum of the others.
Tensor synth_coverage(const Vector& params, const CoverageWorld& world);

/// −(fraction of cells with signal ≥ 0.1) + 0.5·(fraction with interference ≥ 0.05).
double coverage_metric(const Tensor& t);

CompositeProblem make_coverage_problem(std::uint64_t world_seed);

}  // namespace ktb::problems
