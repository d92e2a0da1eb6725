#include "ktb/problems/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "ktb/errors.hpp"

namespace ktb::problems {

CoverageWorld::CoverageWorld(std::uint64_t world_seed) : positions_(kTowers, 2) {
  Rng rng = Rng::stream(world_seed, 0xc0fe7ull);
  for (Index i = 0; i < kTowers; ++i) {
    positions_(i, 0) = rng.uniform();
    positions_(i, 1) = rng.uniform();
  }
}

Tensor synth_coverage(const Vector& params, const CoverageWorld& world) {
  if (params.size() != 2 * kTowers) throw DimensionError("synth_coverage: expected 30 parameters");
  const Index g = kCoverageGrid;
  Tensor out(Shape{2, g, g});
  const Matrix& pos = world.tower_positions();
  for (Index r = 0; r < g; ++r) {
    const double cy = (static_cast<double>(r) + 0.5) / static_cast<double>(g);
    for (Index c = 0; c < g; ++c) {
      const double cx = (static_cast<double>(c) + 0.5) / static_cast<double>(g);
      double best = 0.0;
      double total = 0.0;
      for (Index i = 0; i < kTowers; ++i) {
        const double power = params[2 * i];
        const double tilt = params[2 * i + 1];
        const double dx = cx - pos(i, 0);
        const double dy = cy - pos(i, 1);
        const double s = power * std::exp(-(dx * dx + dy * dy) / (0.02 + 0.2 * tilt * tilt));
        best = std::max(best, s);
        total += s;
      }
      out[r * g + c] = best;
      out[g * g + r * g + c] = total - best;
    }
  }
  return out;
}

double coverage_metric(const Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != 2) throw DimensionError("coverage_metric: expected a 2 × H × W tensor");
  const Index cells = t.dim(1) * t.dim(2);
  Index covered = 0;
  Index interfered = 0;
  for (Index i = 0; i < cells; ++i) {
    if (t[i] >= 0.1) ++covered;
    if (t[cells + i] >= 0.05) ++interfered;
  }
  const auto n = static_cast<double>(cells);
  return -static_cast<double>(covered) / n + 0.5 * static_cast<double>(interfered) / n;
}

CompositeProblem make_coverage_problem(std::uint64_t world_seed) {
  CoverageWorld world(world_seed);
  CompositeProblem p;
  p.name = "coverage";
  p.dim = 2 * kTowers;
  p.output_shape = {2, kCoverageGrid, kCoverageGrid};
  p.simulate = [world](const Vector& x, Rng&) { return synth_coverage(x.cwiseMax(0.0).cwiseMin(1.0), world); };
  p.metrics = [](const Tensor& t) {
    Vector v(1);
    v[0] = coverage_metric(t);
    return v;
  };
  return p;
}

}  // namespace ktb::problems
