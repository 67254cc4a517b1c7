#pragma once

#include <stdexcept>
#include <vector>

#include "krylov/small_dense.hpp"
#include "krylov/sparse.hpp"
#include "krylov/weighting.hpp"

namespace krylov {

/// Weighted Arnoldi factorization kept in transformed coordinates: the stored
/// columns are u_j = Q* v_j, so the transform is applied once per step and
/// never inside the orthogonalization loop.
struct ArnoldiDecomposition {
  std::vector<DenseVector> basis_t;  // k+1 columns, W-orthonormal
  DenseMatrix hess;                  // (max+1) x max backing store; (k+1) x k in use
  std::size_t k = 0;
  double max_raw_norm = 0.0;         // running max of ||u_raw||_W, breakdown scale
};

enum class ArnoldiStatus { Ok, Breakdown };

inline ArnoldiDecomposition arnoldi_start(const InnerProduct& ip, const DenseVector& r0,
                                          std::size_t max_steps) {
  DenseVector u = ip.transform.forward(r0);
  double beta = ip_norm(ip, u);
  if (beta == 0.0) throw std::invalid_argument("arnoldi_start: zero initial residual");
  scale(u, 1.0 / beta);
  ArnoldiDecomposition arn;
  arn.basis_t.push_back(std::move(u));
  arn.hess = DenseMatrix(max_steps + 1, max_steps);
  arn.max_raw_norm = beta;
  return arn;
}

/// One Arnoldi step: modified Gram-Schmidt against all stored columns plus one
/// unconditional full reorthogonalization pass. Returns Breakdown when the new
/// subdiagonal entry falls below 1e-14 times the largest raw norm seen (lucky
/// breakdown; the Krylov space is invariant).
inline ArnoldiStatus arnoldi_extend(const SparseMatrix& A, const InnerProduct& ip,
                                    ArnoldiDecomposition& arn) {
  std::size_t k = arn.k;
  if (k + 1 != arn.basis_t.size())
    throw std::logic_error("arnoldi_extend: inconsistent state");
  DenseVector v = ip.transform.adjoint(arn.basis_t[k]);
  DenseVector w = matvec(A, v);
  DenseVector u = ip.transform.forward(w);

  double raw = ip_norm(ip, u);
  if (raw > arn.max_raw_norm) arn.max_raw_norm = raw;

  for (std::size_t j = 0; j <= k; ++j) {
    double h = ip_dot(ip, u, arn.basis_t[j]);
    arn.hess(j, k) += h;
    axpy(-h, arn.basis_t[j], u);
  }
  for (std::size_t j = 0; j <= k; ++j) {
    double c = ip_dot(ip, u, arn.basis_t[j]);
    arn.hess(j, k) += c;
    axpy(-c, arn.basis_t[j], u);
  }

  double h_sub = ip_norm(ip, u);
  arn.hess(k + 1, k) = h_sub;
  arn.k = k + 1;
  if (h_sub <= 1e-14 * arn.max_raw_norm) return ArnoldiStatus::Breakdown;
  scale(u, 1.0 / h_sub);
  arn.basis_t.push_back(std::move(u));
  return ArnoldiStatus::Ok;
}

}  // namespace krylov
