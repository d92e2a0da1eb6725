#include "ktb/problems/registry.hpp"

#include "ktb/errors.hpp"
#include "ktb/problems/coverage.hpp"
#include "ktb/problems/environmental.hpp"
#include "ktb/problems/optics.hpp"

namespace ktb::problems {

CompositeProblem make_problem(std::string_view id, std::uint64_t world_seed) {
  if (id == "env34") return make_environmental_problem(GridSpec::grid_3x4(), "env34");
  if (id == "env510") return make_environmental_problem(GridSpec::grid_5x10(), "env510");
  if (id == "coverage") return make_coverage_problem(world_seed);
  if (id == "optics" || id == "optics_desk") {
    OpticsProblemOptions opts;
    opts.shape = id == "optics" ? OpticsShape::full() : OpticsShape::desk();
    opts.world_seed = world_seed;
    return make_optics_problem(opts, std::string(id));
  }
  if (id == "constant_desk") {
    OpticsProblemOptions opts;
    opts.shape = OpticsShape::desk();
    opts.world_seed = world_seed;
    opts.noise_trials = 0;
    CompositeProblem p = make_optics_problem(opts, "constant_desk");
    auto render = p.simulate;
    const Vector anchor = Vector::Constant(p.dim, 0.5);
    p.simulate = [render, anchor](const Vector&, Rng& rng) { return render(anchor, rng); };
    return p;
  }
  throw ConfigError("unknown problem '" + std::string(id) + "'");
}

std::vector<std::string> problem_ids() { return {"env34", "env510", "coverage", "optics", "optics_desk", "constant_desk"}; }

}  // namespace ktb::problems
