#include "ktb/trust_region.hpp"

#include <algorithm>

#include "ktb/errors.hpp"
#include "ktb/sobol.hpp"

namespace ktb {

TrustRegionConstants TrustRegionConstants::for_problem(Index dim, Index batch) {
  TrustRegionConstants c;
  const auto q = std::max<Index>(batch, 1);
  const auto fail = static_cast<int>((dim + q - 1) / q);
  c.failure_tolerance = std::clamp(fail, 4, 30);
  return c;
}

TrustRegionState TrustRegionState::initial(Vector center, const TrustRegionConstants& constants) {
  TrustRegionState s;
  s.center = std::move(center);
  s.length = constants.length_init;
  s.constants = constants;
  return s;
}

TrustRegionState tr_update(TrustRegionState state, bool improved) {
  const auto& c = state.constants;
  state.restart = false;
  if (improved) {
    ++state.success_count;
    state.failure_count = 0;
  } else {
    ++state.failure_count;
    state.success_count = 0;
  }
  if (state.success_count >= c.success_tolerance) {
    state.length = std::min(2.0 * state.length, c.length_max);
    state.success_count = 0;
  } else if (state.failure_count >= c.failure_tolerance) {
    state.length /= 2.0;
    state.failure_count = 0;
  }
  if (state.length < c.length_min) {
    state.restart = true;
    state.length = c.length_init;
    state.success_count = 0;
    state.failure_count = 0;
  }
  return state;
}

Box trust_region_box(const TrustRegionState& state) {
  const Vector half = Vector::Constant(state.center.size(), state.length / 2.0);
  return Box{(state.center - half).cwiseMax(0.0), (state.center + half).cwiseMin(1.0)};
}

Matrix generate_candidates(const TrustRegionState& state, Index n_candidates, Rng& rng) {
  if (n_candidates < 1) throw InvalidInputError("generate_candidates: n_candidates must be >= 1");
  const Index d = state.center.size();
  if (d < 1) throw DimensionError("generate_candidates: empty center");
  const Box box = trust_region_box(state);
  const Matrix u = scrambled_sobol(n_candidates, d, rng);
  const double p = std::min(20.0 / static_cast<double>(d), 1.0);

  Matrix out(n_candidates, d);
  for (Index i = 0; i < n_candidates; ++i) {
    bool any = false;
    for (Index j = 0; j < d; ++j) {
      const bool perturb = p >= 1.0 || rng.bernoulli(p);
      any = any || perturb;
      out(i, j) = perturb ? box.lower[j] + (box.upper[j] - box.lower[j]) * u(i, j) : state.center[j];
    }
    if (!any) {
      const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
      out(i, j) = box.lower[j] + (box.upper[j] - box.lower[j]) * u(i, j);
    }
  }
  return out;
}

}  // namespace ktb
