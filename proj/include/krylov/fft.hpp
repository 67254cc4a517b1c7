#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

namespace krylov {

using Complex = std::complex<double>;

/// Complex FFT plan for arbitrary length: mixed-radix Cooley-Tukey for smooth
/// sizes, Bluestein's chirp-z algorithm when a prime factor exceeds 37.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n_ == 0) return;
    std::size_t rem = n_;
    for (std::size_t p = 2; p * p <= rem;) {
      if (rem % p == 0) {
        factors_.push_back(p);
        rem /= p;
      } else {
        ++p;
      }
    }
    if (rem > 1) factors_.push_back(rem);
    bool smooth = true;
    for (std::size_t p : factors_)
      if (p > 37) smooth = false;

    if (smooth) {
      table_.resize(n_);
      for (std::size_t j = 0; j < n_; ++j)
        table_[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) /
                                        static_cast<double>(n_));
    } else {
      // Bluestein: convolution of chirped input with the conjugate chirp,
      // carried out with a power-of-two FFT of length >= 2n-1.
      std::size_t m = 1;
      while (m < 2 * n_ - 1) m <<= 1;
      inner_ = std::make_unique<Fft>(m);
      chirp_.resize(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        // j^2 mod 2n keeps the argument small for large n
        std::size_t j2 = (j * j) % (2 * n_);
        chirp_[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(j2) /
                                        static_cast<double>(n_));
      }
      std::vector<Complex> b(m, Complex(0.0, 0.0));
      b[0] = std::conj(chirp_[0]);
      for (std::size_t j = 1; j < n_; ++j) b[j] = b[m - j] = std::conj(chirp_[j]);
      chirp_fft_ = inner_->forward(b);
    }
  }

  std::size_t size() const { return n_; }

  std::vector<Complex> forward(const std::vector<Complex>& x) const {
    std::vector<Complex> out(n_);
    if (n_ == 0) return out;
    if (inner_) {
      bluestein(x, out);
    } else {
      std::vector<Complex> in = x;
      rec(in.data(), out.data(), n_, 1, 1);
    }
    return out;
  }

  /// Unscaled inverse DFT divided by n (true inverse).
  std::vector<Complex> inverse(const std::vector<Complex>& x) const {
    std::vector<Complex> tmp(n_);
    for (std::size_t j = 0; j < n_; ++j) tmp[j] = std::conj(x[j]);
    std::vector<Complex> out = forward(tmp);
    double inv = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v = std::conj(v) * inv;
    return out;
  }

 private:
  // DFT of in[0], in[stride], ..., length len; twiddles indexed through the
  // root table with multiplier mult = n_/len.
  void rec(const Complex* in, Complex* out, std::size_t len, std::size_t stride,
           std::size_t mult) const {
    if (len <= 16 || is_prime(len)) {
      for (std::size_t k = 0; k < len; ++k) {
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < len; ++j)
          acc += table_[((j * k) % len) * mult] * in[j * stride];
        out[k] = acc;
      }
      return;
    }
    std::size_t p = smallest_factor(len);
    std::size_t m = len / p;
    std::vector<Complex> sub(len);
    for (std::size_t j = 0; j < p; ++j)
      rec(in + j * stride, sub.data() + j * m, m, stride * p, mult * p);
    for (std::size_t q = 0; q < p; ++q)
      for (std::size_t r = 0; r < m; ++r) {
        std::size_t k = q * m + r;
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < p; ++j)
          acc += table_[((j * k) % len) * mult] * sub[j * m + r];
        out[k] = acc;
      }
  }

  void bluestein(const std::vector<Complex>& x, std::vector<Complex>& out) const {
    std::size_t m = inner_->size();
    std::vector<Complex> a(m, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
    std::vector<Complex> fa = inner_->forward(a);
    for (std::size_t j = 0; j < m; ++j) fa[j] *= chirp_fft_[j];
    std::vector<Complex> conv = inner_->inverse(fa);
    for (std::size_t k = 0; k < n_; ++k) out[k] = conv[k] * chirp_[k];
  }

  static bool is_prime(std::size_t v) {
    if (v < 4) return v >= 2;
    for (std::size_t p = 2; p * p <= v; ++p)
      if (v % p == 0) return false;
    return true;
  }

  static std::size_t smallest_factor(std::size_t v) {
    for (std::size_t p = 2; p * p <= v; ++p)
      if (v % p == 0) return p;
    return v;
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<Complex> table_;                 // e^{-2 pi i j / n}, smooth path
  std::unique_ptr<Fft> inner_;                 // Bluestein inner power-of-two plan
  std::vector<Complex> chirp_;                 // e^{-i pi j^2 / n}
  std::vector<Complex> chirp_fft_;
};

}  // namespace krylov
