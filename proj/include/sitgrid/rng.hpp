#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace sitgrid {

/// Deterministic splittable generator (SplitMix64). All randomness in the
/// library goes through this class instead of <random> distributions, so a
/// given seed produces the same stream on every platform and build.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform index in [0, n). n must be > 0.
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  /// Box-Muller normal draw. Consumes two uniforms per call; no caching, so
  /// the stream position is a fixed function of the call count.
  double next_normal(double mean, double sd) {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a root seed and an ordered list of
/// integer parts (participant index, posture rank, fold id, ...). Used so
/// per-record / per-fold generators are pure functions of their coordinates.
inline std::uint64_t derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = detail::mix64(seed + 0x9E3779B97F4A7C15ull);
  for (std::uint64_t p : parts) {
    h = detail::mix64(h ^ (p + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
  }
  return h;
}

/// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.next_index(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace sitgrid
