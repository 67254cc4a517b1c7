#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

namespace krylov {

/// Small dense row-major matrix for Hessenberg and coefficient-space work.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols != B.rows) throw std::invalid_argument("matmul: dimension mismatch");
  DenseMatrix C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      double aik = A(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

inline DenseMatrix transpose(const DenseMatrix& A) {
  DenseMatrix T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

/// Solves A x = b for square A (LU with partial pivoting).
inline std::vector<double> dense_solve(DenseMatrix A, std::vector<double> b) {
  if (A.rows != A.cols || b.size() != A.rows)
    throw std::invalid_argument("dense_solve: dimension mismatch");
  lapack_int n = static_cast<lapack_int>(A.rows);
  std::vector<lapack_int> ipiv(A.rows);
  lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, n, 1, A.a.data(), n, ipiv.data(),
                                  b.data(), 1);
  if (info != 0) throw std::runtime_error("dense_solve: singular matrix");
  return b;
}

struct EigenDecomposition {
  std::vector<std::complex<double>> values;
  // Right eigenvectors, one per value; conjugate pairs carry conjugate vectors.
  std::vector<std::vector<std::complex<double>>> vectors;
};

/// Eigenvalues and right eigenvectors of a general real square matrix.
inline EigenDecomposition dense_eig(DenseMatrix A) {
  if (A.rows != A.cols) throw std::invalid_argument("dense_eig: square matrix required");
  lapack_int n = static_cast<lapack_int>(A.rows);
  std::vector<double> wr(A.rows), wi(A.rows), vr(A.rows * A.rows), vl(A.rows * A.rows);
  lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', n, A.a.data(), n, wr.data(),
                                  wi.data(), vl.data(), n, vr.data(), n);
  if (info != 0) throw std::runtime_error("dense_eig: dgeev failed");
  EigenDecomposition out;
  std::size_t m = A.rows;
  out.values.resize(m);
  out.vectors.assign(m, std::vector<std::complex<double>>(m));
  for (std::size_t j = 0; j < m; ++j) {
    out.values[j] = {wr[j], wi[j]};
    if (wi[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) {
        out.vectors[j][i] = {vr[i * m + j], vr[i * m + j + 1]};
        out.vectors[j + 1][i] = {vr[i * m + j], -vr[i * m + j + 1]};
      }
    } else if (wi[j] == 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.vectors[j][i] = {vr[i * m + j], 0.0};
    }
  }
  return out;
}

/// Cholesky M = R^T R with R upper triangular. Throws if M is not numerically
/// positive definite (pivot below tol * max diagonal).
inline DenseMatrix cholesky_upper(const DenseMatrix& M, double pivot_tol = 1e-14) {
  if (M.rows != M.cols) throw std::invalid_argument("cholesky_upper: square matrix required");
  std::size_t n = M.rows;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, M(i, i));
  DenseMatrix A = M;
  lapack_int ln = static_cast<lapack_int>(n);
  lapack_int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'U', ln, A.a.data(), ln);
  if (info != 0) throw std::runtime_error("cholesky_upper: matrix not positive definite");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(A(i, i) * A(i, i) > pivot_tol * max_diag))
      throw std::runtime_error("cholesky_upper: pivot below threshold");
    for (std::size_t j = 0; j < i; ++j) A(i, j) = 0.0;
  }
  return A;
}

}  // namespace krylov
