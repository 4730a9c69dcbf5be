#ifndef DIRMPS_RNG_HPP
#define DIRMPS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dirmps {

/// splitmix64 step, used to derive independent per-topic seeds from a
/// master seed. Fully specified, identical on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random source. The raw stream is std::mt19937_64 (the
/// generator algorithm is fixed by the C++ standard); uniform doubles take
/// the top 53 bits, normals come from Box-Muller. No std::*_distribution is
/// used, so identical seeds reproduce identical draws across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on (0, 1].
  double uniform01() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (uniform01() - 0x1.0p-53);
  }

  bool bernoulli(double p) { return uniform01() <= p; }

  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dirmps

#endif  // DIRMPS_RNG_HPP
