#pragma once

#include <cmath>

#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

struct TrustRegionConstants {
  double length_init = 0.8;
  double length_min = 0.0078125;  // 0.5^7
  double length_max = 1.6;
  int success_tolerance = 3;
  int failure_tolerance = 4;

  /// failure_tolerance = ceil(dim / batch) clipped to [4, 30].
  static TrustRegionConstants for_problem(Index dim, Index batch);
};

struct TrustRegionState {
  Vector center;
  double length = 0.8;
  int success_count = 0;
  int failure_count = 0;
  bool restart = false;
  TrustRegionConstants constants;

  static TrustRegionState initial(Vector center, const TrustRegionConstants& constants);
};

/// Success/failure bookkeeping: tau_succ consecutive successes double the
/// edge length (capped at length_max), tau_fail consecutive failures halve
/// it; falling below length_min flags a restart at length_init.
TrustRegionState tr_update(TrustRegionState state, bool improved);

/// [center − L/2, center + L/2] ∩ [0,1]^d.
struct Box {
  Vector lower;
  Vector upper;
};
Box trust_region_box(const TrustRegionState& state);

/// Candidate pool for Thompson sampling: scrambled Sobol points in the
/// trust-region box, where each coordinate takes the Sobol value with
/// probability min(20/d, 1) and otherwise keeps the center's value. At
/// least one coordinate of every candidate is perturbed.
Matrix generate_candidates(const TrustRegionState& state, Index n_candidates, Rng& rng);

}  // namespace ktb
