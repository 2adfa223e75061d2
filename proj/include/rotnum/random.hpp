#pragma once

// Counter-based random numbers: every draw is a pure function of its key, so
// results do not depend on how replicas are scheduled across workers.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <utility>

namespace rotnum {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Uniform in (0, 1), never exactly 0.
inline double uniform_open(std::uint64_t bits) {
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw determined by `key` (Box-Muller on two hashed
/// uniforms).
inline double normal_from_key(std::uint64_t key) {
  const double u1 = uniform_open(splitmix64(key));
  const double u2 = uniform_open(splitmix64(key ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Brownian increments on a dyadic hierarchy of grids. Level 0 has step
/// `dt`; level L has step dt / 2^L and its increments are obtained from
/// level L-1 by Brownian-bridge splitting, so refining the grid keeps the
/// same underlying path.
class BrownianPath {
 public:
  BrownianPath(std::uint64_t seed, std::uint64_t stream, double dt)
      : seed_(seed), stream_(stream), dt_(dt), sqrt_dt_(std::sqrt(dt)) {}

  double base_step() const { return dt_; }

  /// Increment of component `i` over step `k` of level `level`.
  double increment(unsigned level, std::uint64_t k, unsigned i) const {
    if (level == 0) return sqrt_dt_ * normal_from_key(hash_key({seed_, stream_, 0, k, i}));
    const double parent = increment(level - 1, k >> 1, i);
    const double parent_dt = dt_ / double(std::uint64_t{1} << (level - 1));
    const double z = normal_from_key(hash_key({seed_, stream_, level, k >> 1, i, 0xb71dULL}));
    const double left = 0.5 * parent + 0.5 * std::sqrt(parent_dt) * z;
    return (k & 1) ? parent - left : left;
  }

  /// Splits an increment `dw` over a step of length `h` into two halves.
  /// `tag` identifies the split so repeated calls agree.
  std::pair<double, double> bridge_split(double dw, double h, std::uint64_t tag) const {
    const double z = normal_from_key(hash_key({seed_, stream_, 0xada9ULL, tag}));
    const double left = 0.5 * dw + 0.5 * std::sqrt(h) * z;
    return {left, dw - left};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  double dt_;
  double sqrt_dt_;
};

}  // namespace rotnum
