#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "krylov/rng.hpp"
#include "krylov/transform.hpp"
#include "krylov/vector.hpp"

namespace krylov {

/// Weighted inner product W = Q diag(w) Q*. All ip_* routines take arguments
/// already in transformed coordinates (x_t = Q* x).
struct InnerProduct {
  Transform transform;
  DenseVector weights;       // w_j > 0
  DenseVector sqrt_weights;  // s_j = sqrt(w_j)

  InnerProduct(Transform t, DenseVector w) : transform(std::move(t)), weights(std::move(w)) {
    sqrt_weights.resize(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (!(weights[j] > 0.0)) throw std::invalid_argument("InnerProduct: weights must be > 0");
      sqrt_weights[j] = std::sqrt(weights[j]);
    }
  }

  double min_sqrt_weight() const {
    double m = sqrt_weights.empty() ? 1.0 : sqrt_weights[0];
    for (double s : sqrt_weights) m = std::min(m, s);
    return m;
  }
  double max_sqrt_weight() const {
    double m = sqrt_weights.empty() ? 1.0 : sqrt_weights[0];
    for (double s : sqrt_weights) m = std::max(m, s);
    return m;
  }
};

struct WeightStrategy {
  enum class Kind { Euclidean, Residual, RandomUniform };
  Kind kind = Kind::Euclidean;
  double power = 1.0;  // Residual
  double lo = 0.5, hi = 1.5;  // RandomUniform
};

/// Residual-derived weights: w_j = clamp((|r_j|/||r||_inf)^power, floor, 1).
/// power = 1 is Essai's rule; power = 0 gives exact all-ones (Euclidean).
inline DenseVector weights_from_residual(const DenseVector& r_transformed, double power,
                                         double floor = 1e-10) {
  double m = norm_inf(r_transformed);
  if (m == 0.0) throw std::invalid_argument("weights_from_residual: zero residual");
  DenseVector w(r_transformed.size());
  if (power == 0.0) {
    for (double& v : w) v = 1.0;
    return w;
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    double ratio = std::abs(r_transformed[j]) / m;
    double v = std::pow(ratio, power);
    if (v < floor) v = floor;
    if (v > 1.0) v = 1.0;
    w[j] = v;
  }
  return w;
}

/// Uniform random weights on [lo,hi], floored so every entry stays positive.
inline DenseVector random_weights(std::size_t n, double lo, double hi, Rng& rng,
                                  double floor = 1e-10) {
  if (!(0.0 <= lo && lo < hi)) throw std::invalid_argument("random_weights: need 0 <= lo < hi");
  DenseVector w(n);
  for (double& v : w) v = std::max(rng.uniform(lo, hi), floor);
  return w;
}

inline double ip_dot(const InnerProduct& ip, const DenseVector& x_t, const DenseVector& y_t) {
  if (x_t.size() != ip.weights.size() || y_t.size() != ip.weights.size())
    throw std::invalid_argument("ip_dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x_t.size(); ++j) s += ip.weights[j] * x_t[j] * y_t[j];
  return s;
}

inline double ip_norm(const InnerProduct& ip, const DenseVector& x_t) {
  return std::sqrt(ip_dot(ip, x_t, x_t));
}

}  // namespace krylov
