#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "krylov/fft.hpp"
#include "krylov/vector.hpp"

namespace krylov {

enum class TransformKind { Identity, Cosine };

/// Orthogonal coordinate transform used inside weighted inner products.
/// `forward` is the analysis map Q* (for Cosine, the orthonormal DCT-II, i.e.
/// MATLAB's dct); `adjoint` is its inverse Q. Plans are immutable and shared,
/// so copies are cheap and applications are reentrant.
class Transform {
 public:
  static Transform identity(std::size_t dim) { return Transform(TransformKind::Identity, dim); }
  static Transform cosine(std::size_t dim) { return Transform(TransformKind::Cosine, dim); }
  static Transform make(TransformKind kind, std::size_t dim) { return Transform(kind, dim); }

  TransformKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  DenseVector forward(const DenseVector& x) const {
    check(x);
    if (kind_ == TransformKind::Identity) return x;
    if (dim_ <= 16) return dct_naive(x);
    // Real even extension of length 4N: FFT(z)[k] = 2 sum x_n cos(pi(2n+1)k/2N)
    std::size_t N = dim_;
    std::vector<Complex> z(4 * N, Complex(0.0, 0.0));
    for (std::size_t n = 0; n < N; ++n) {
      z[2 * n + 1] = Complex(x[n], 0.0);
      z[4 * N - 2 * n - 1] = Complex(x[n], 0.0);
    }
    std::vector<Complex> Z = plan_->forward(z);
    DenseVector y(N);
    double c0 = std::sqrt(1.0 / static_cast<double>(N));
    double ck = std::sqrt(2.0 / static_cast<double>(N));
    for (std::size_t k = 0; k < N; ++k) y[k] = (k == 0 ? c0 : ck) * 0.5 * Z[k].real();
    return y;
  }

  DenseVector adjoint(const DenseVector& y) const {
    check(y);
    if (kind_ == TransformKind::Identity) return y;
    if (dim_ <= 16) return dct3_naive(y);
    // x_n = Re(FFT(a)[2n+1]) with a_k = c_k y_k zero-padded to 4N
    std::size_t N = dim_;
    std::vector<Complex> a(4 * N, Complex(0.0, 0.0));
    double c0 = std::sqrt(1.0 / static_cast<double>(N));
    double ck = std::sqrt(2.0 / static_cast<double>(N));
    for (std::size_t k = 0; k < N; ++k) a[k] = Complex((k == 0 ? c0 : ck) * y[k], 0.0);
    std::vector<Complex> Z = plan_->forward(a);
    DenseVector x(N);
    for (std::size_t n = 0; n < N; ++n) x[n] = Z[2 * n + 1].real();
    return x;
  }

 private:
  Transform(TransformKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
    if (kind_ == TransformKind::Cosine && dim_ > 16)
      plan_ = std::make_shared<Fft>(4 * dim_);
  }

  void check(const DenseVector& v) const {
    if (v.size() != dim_) throw std::invalid_argument("transform: dimension mismatch");
  }

  DenseVector dct3_naive(const DenseVector& y) const {
    std::size_t N = dim_;
    DenseVector x(N, 0.0);
    double c0 = std::sqrt(1.0 / static_cast<double>(N));
    double ck = std::sqrt(2.0 / static_cast<double>(N));
    for (std::size_t n = 0; n < N; ++n) {
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k)
        s += (k == 0 ? c0 : ck) * y[k] *
             std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * N));
      x[n] = s;
    }
    return x;
  }

 public:
  /// Direct O(N^2) orthonormal DCT-II; correctness oracle for `forward`.
  static DenseVector dct_naive(const DenseVector& x) {
    std::size_t N = x.size();
    DenseVector y(N, 0.0);
    double c0 = std::sqrt(1.0 / static_cast<double>(N));
    double ck = std::sqrt(2.0 / static_cast<double>(N));
    for (std::size_t k = 0; k < N; ++k) {
      double s = 0.0;
      for (std::size_t n = 0; n < N; ++n)
        s += x[n] * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / (2.0 * N));
      y[k] = (k == 0 ? c0 : ck) * s;
    }
    return y;
  }

 private:
  TransformKind kind_;
  std::size_t dim_;
  std::shared_ptr<const Fft> plan_;
};

}  // namespace krylov
