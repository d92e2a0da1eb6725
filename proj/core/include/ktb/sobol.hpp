#pragma once

#include <cstdint>

#include "ktb/rng.hpp"
#include "ktb/tensor.hpp"

namespace ktb {

/// Sobol points in [0,1)^dim with a random digital shift (each coordinate's
/// 64-bit integer XORed with a per-dimension key drawn from `rng`).
/// Supports up to 3667 dimensions.
Matrix scrambled_sobol(Index n, Index dim, Rng& rng);

/// Convenience overload with a dedicated stream for `seed`.
Matrix scrambled_sobol(Index n, Index dim, std::uint64_t seed);

}  // namespace ktb
