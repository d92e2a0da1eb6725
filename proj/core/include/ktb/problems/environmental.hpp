#pragma once

#include "ktb/problem.hpp"
#include "ktb/tensor.hpp"

namespace ktb::problems {

/// Pollutant spill parameters: mass, diffusion rate, location and time of
/// the second spill.
struct EnvParams {
  double mass = 10.0;
  double diffusion = 0.07;
  double location = 1.505;
  double time = 30.1525;

  static EnvParams truth() { return {}; }
  /// Maps a unit-cube point onto the parameter box
  /// M∈[7,13], D∈[0.02,0.12], L∈[0.01,3], τ∈[30.01,30.295].
  static EnvParams from_unit(const Vector& x);
  Vector to_unit() const;
  void validate() const;
};

/// Observation sites s and times t.
struct GridSpec {
  Vector s;
  Vector t;

  /// s ∈ {0, 1, 2.5}, t ∈ {15, 30, 45, 60}.
  static GridSpec grid_3x4();
  /// 5 sites evenly on [0, 2.5], 10 times evenly on [15, 60].
  static GridSpec grid_5x10();
};

/// c(s,t) = M/√(4πDt)·exp(−s²/(4Dt))
///        + 1{t>τ}·M/√(4πD(t−τ))·exp(−(s−L)²/(4D(t−τ)))
Matrix env_concentration(const EnvParams& p, const GridSpec& grid);

/// Mean squared difference between equally-shaped matrices.
double env_mse_objective(const Matrix& output, const Matrix& target);

/// MSE to the output of the true parameters; outputs are |s| × |t| tensors.
CompositeProblem make_environmental_problem(const GridSpec& grid, std::string name);

}  // namespace ktb::problems
