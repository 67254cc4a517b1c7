#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace krylov {

/// Dense real vector. All solver routines use plain contiguous storage.
using DenseVector = std::vector<double>;

inline double dot(const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const DenseVector& x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(const DenseVector& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, const DenseVector& x, DenseVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(DenseVector& x, double alpha) {
  for (double& v : x) v *= alpha;
}

}  // namespace krylov
