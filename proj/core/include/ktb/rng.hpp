#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>

namespace ktb {

/// SplitMix64 finalizer; used to derive independent stream keys.
std::uint64_t mix64(std::uint64_t x);

/// Pseudo-random stream (xoshiro256**) with its own uniform and normal
/// transforms so draws are identical across standard libraries.
///
/// Streams are addressed by a tuple of counters: `Rng::stream(seed, a, b)`
/// always yields the same sequence, and distinct tuples yield independent
/// sequences. This lets batched or parallel work reproduce a serial run.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  /// Derives a child stream without advancing this one.
  Rng split(std::uint64_t tag) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Binomial(n, p) by inversion: from zero for small means, otherwise by a
  /// chop-down search outward from the mode.
  std::int64_t binomial(std::int64_t n, double p);

  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ktb
