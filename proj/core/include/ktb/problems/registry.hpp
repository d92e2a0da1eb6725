#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ktb/problem.hpp"

namespace ktb::problems {

/// Builds a named benchmark problem: env34, env510, coverage, optics,
/// optics_desk, or constant_desk (optics_desk shape with x-independent
/// images, for model-fit sanity checks).
CompositeProblem make_problem(std::string_view id, std::uint64_t world_seed = 7);

std::vector<std::string> problem_ids();

}  // namespace ktb::problems
