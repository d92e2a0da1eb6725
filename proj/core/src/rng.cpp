#include "ktb/rng.hpp"

#include <cmath>
#include <numbers>

namespace ktb {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t k = seed;
  for (auto& s : s_) {
    k = mix64(k);
    s = k;
  }
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(mix64(mix64(mix64(seed) ^ a) + 0x632be59bd9b4e019ull * (b + 1)));
}

Rng Rng::split(std::uint64_t tag) const {
  return Rng(mix64(s_[0] ^ mix64(s_[1] + tag) ^ rotl(s_[2], 17) ^ s_[3]));
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller on (0, 1] x [0, 1).
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);

  const double q = 1.0 - p;
  const double mean = static_cast<double>(n) * p;
  double u = uniform();

  if (mean < 30.0) {
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    double r = std::pow(q, static_cast<double>(n));
    std::int64_t x = 0;
    while (u > r && x < n) {
      u -= r;
      ++x;
      r *= a / static_cast<double>(x) - s;
    }
    return x;
  }

  const auto mode = static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p));
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(mode);
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) - std::lgamma(nd - md + 1.0) +
                        md * std::log(p) + (nd - md) * std::log(q);
  const double pm = std::exp(log_pm);
  if (u < pm) return mode;
  u -= pm;

  const double odds = p / q;
  std::int64_t hi = mode;
  std::int64_t lo = mode;
  double p_hi = pm;
  double p_lo = pm;
  while (hi < n || lo > 0) {
    if (hi < n) {
      p_hi *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * odds;
      ++hi;
      if (u < p_hi) return hi;
      u -= p_hi;
    }
    if (lo > 0) {
      p_lo *= static_cast<double>(lo) / static_cast<double>(n - lo + 1) / odds;
      --lo;
      if (u < p_lo) return lo;
      u -= p_lo;
    }
  }
  return mode;  // cumulative roundoff left u past the total mass
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
  return z;
}

}  // namespace ktb
