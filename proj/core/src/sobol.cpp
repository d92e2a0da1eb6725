#include "ktb/sobol.hpp"

#include <vector>

#include <boost/random/sobol.hpp>

#include "ktb/errors.hpp"

namespace ktb {

Matrix scrambled_sobol(Index n, Index dim, Rng& rng) {
  if (dim < 1 || dim > 3667) throw InvalidInputError("scrambled_sobol: dimension must be in [1, 3667]");
  if (n < 0) throw InvalidInputError("scrambled_sobol: negative point count");
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng();
  boost::random::sobol engine(static_cast<unsigned>(dim));
  Matrix out(n, dim);
  // Boost starts after the origin; putting it back makes every 2^k prefix a net.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const std::uint64_t raw = i == 0 ? 0 : engine();
      const std::uint64_t v = raw ^ shift[static_cast<std::size_t>(j)];
      out(i, j) = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
  }
  return out;
}

Matrix scrambled_sobol(Index n, Index dim, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0x50b01ull);
  return scrambled_sobol(n, dim, rng);
}

}  // namespace ktb
