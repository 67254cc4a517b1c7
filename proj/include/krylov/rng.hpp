#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "krylov/vector.hpp"

namespace krylov {

/// Deterministic random stream: mt19937_64 with an explicit Box-Muller for
/// normals, so output is identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0,1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal (Box-Muller, trigonometric form; pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline DenseVector randn_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseVector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace krylov
