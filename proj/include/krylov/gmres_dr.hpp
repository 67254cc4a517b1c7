#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "krylov/gmres.hpp"
#include "krylov/small_dense.hpp"

namespace krylov {

/// Deflation subspace carried across restarts: k+1 W-orthonormal columns in
/// transformed coordinates with a full (k+1) x k recurrence matrix and the
/// coefficients of the current residual in that basis.
struct DeflationBasis {
  std::vector<DenseVector> basis_t;  // k+1 columns
  DenseMatrix hess;                  // (k+1) x k, full
  DenseVector rhs_coeffs;            // length k+1; r = V_{k+1} c
};

struct HarmonicRitzPair {
  std::complex<double> value;
  std::vector<std::complex<double>> coeffs;  // length m
};

/// Harmonic Ritz pairs of an extended Hessenberg matrix: eigenpairs of
/// H_m + h_{m+1,m}^2 f e_m^T with H_m^T f = e_m. These are the roots of the
/// cycle's GMRES residual polynomial.
inline std::vector<HarmonicRitzPair> harmonic_ritz(const DenseMatrix& hess) {
  if (hess.rows != hess.cols + 1 || hess.cols == 0)
    throw std::invalid_argument("harmonic_ritz: (m+1) x m matrix required");
  std::size_t m = hess.cols;
  DenseMatrix Hm(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) Hm(i, j) = hess(i, j);
  double h = hess(m, m - 1);

  DenseMatrix M = Hm;
  if (h != 0.0) {
    std::vector<double> em(m, 0.0);
    em[m - 1] = 1.0;
    std::vector<double> f = dense_solve(transpose(Hm), em);  // throws if singular
    for (std::size_t i = 0; i < m; ++i) M(i, m - 1) += h * h * f[i];
  }
  EigenDecomposition eig = dense_eig(M);
  std::vector<HarmonicRitzPair> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = {eig.values[j], eig.vectors[j]};
  return out;
}

/// Roots of the residual polynomial of one GMRES cycle with extended
/// Hessenberg `hess` ((j+1) x j).
inline std::vector<std::complex<double>> cycle_poly_roots(const DenseMatrix& hess) {
  std::vector<std::complex<double>> roots;
  for (const auto& p : harmonic_ritz(hess)) roots.push_back(p.value);
  return roots;
}

namespace detail {

// Modified Gram-Schmidt QR with one reorthogonalization pass; drops columns
// that become numerically dependent. Returns orthonormal columns.
inline std::vector<DenseVector> mgs_qr(std::vector<DenseVector> cols) {
  std::vector<DenseVector> q;
  for (auto& c : cols) {
    double orig = norm2(c);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) axpy(-dot(c, u), u, c);
    double nrm = norm2(c);
    if (nrm <= 1e-12 * (orig > 0 ? orig : 1.0)) continue;  // dependent column
    scale(c, 1.0 / nrm);
    q.push_back(std::move(c));
  }
  return q;
}

}  // namespace detail

/// Restart contraction: selects the k smallest-magnitude harmonic Ritz values
/// (conjugate pairs kept together, k grown by one if a pair straddles the
/// cutoff), appends the residual coefficient vector, orthonormalizes the
/// coefficient matrix, and contracts basis, recurrence, and rhs coefficients.
inline DeflationBasis dr_restart(const std::vector<DenseVector>& basis_t,
                                 const DenseMatrix& hess, const DenseVector& y,
                                 const DenseVector& c, std::size_t k) {
  std::size_t m = hess.cols;
  if (k < 1 || k >= m) throw std::invalid_argument("dr_restart: need 1 <= k < m");
  if (basis_t.size() != m + 1) throw std::invalid_argument("dr_restart: basis size mismatch");

  std::vector<HarmonicRitzPair> hr = harmonic_ritz(hess);
  std::vector<std::size_t> order(hr.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(hr[a].value) < std::abs(hr[b].value);
  });

  // coefficient columns: Re(g) for real values, (Re g, Im g) per conjugate pair
  std::vector<DenseVector> gcols;
  std::vector<bool> used(hr.size(), false);
  for (std::size_t idx : order) {
    if (gcols.size() >= k) break;
    if (used[idx]) continue;
    used[idx] = true;
    const auto& pair = hr[idx];
    DenseVector re(m), im(m);
    bool complex_pair = pair.value.imag() != 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      re[i] = pair.coeffs[i].real();
      im[i] = pair.coeffs[i].imag();
    }
    gcols.push_back(std::move(re));
    if (complex_pair) {
      // mark the conjugate partner as consumed
      for (std::size_t other = 0; other < hr.size(); ++other)
        if (!used[other] && hr[other].value == std::conj(pair.value)) {
          used[other] = true;
          break;
        }
      gcols.push_back(std::move(im));
    }
  }

  // residual coefficients in the old basis
  DenseVector chat(m + 1, 0.0);
  for (std::size_t i = 0; i < m + 1; ++i) chat[i] = (i < c.size() ? c[i] : 0.0);
  for (std::size_t j = 0; j < y.size(); ++j)
    for (std::size_t i = 0; i < m + 1; ++i) chat[i] -= hess(i, j) * y[j];

  std::vector<DenseVector> pcols;
  for (auto& g : gcols) {
    g.push_back(0.0);  // extend to length m+1
    pcols.push_back(std::move(g));
  }
  pcols.push_back(chat);
  std::vector<DenseVector> P = detail::mgs_qr(std::move(pcols));
  if (P.size() < 2) throw std::runtime_error("dr_restart: degenerate coefficient matrix");
  std::size_t kk = P.size() - 1;

  DeflationBasis out;
  std::size_t n = basis_t[0].size();
  for (std::size_t j = 0; j <= kk; ++j) {
    DenseVector u(n, 0.0);
    for (std::size_t i = 0; i < m + 1; ++i) axpy(P[j][i], basis_t[i], u);
    out.basis_t.push_back(std::move(u));
  }
  // H_new = P_{k+1}^T Hbar P_k with P_k the leading m x kk block
  out.hess = DenseMatrix(kk + 1, kk);
  for (std::size_t jc = 0; jc < kk; ++jc) {
    DenseVector hp(m + 1, 0.0);  // Hbar * P_k(:,jc)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m + 1; ++i) hp[i] += hess(i, j) * P[jc][j];
    for (std::size_t ir = 0; ir <= kk; ++ir) {
      double s = 0.0;
      for (std::size_t i = 0; i < m + 1; ++i) s += P[ir][i] * hp[i];
      out.hess(ir, jc) = s;
    }
  }
  out.rhs_coeffs.assign(kk + 1, 0.0);
  for (std::size_t j = 0; j <= kk; ++j) out.rhs_coeffs[j] = dot(P[j], chat);
  return out;
}

/// Converts the carried recurrence to a new inner product (same transform,
/// new diagonal weights) via the Cholesky factor of the small Gram matrix.
inline DeflationBasis reweight_deflation(const DeflationBasis& basis, const InnerProduct& new_ip) {
  std::size_t kp1 = basis.basis_t.size();
  if (kp1 == 0 || basis.hess.rows != kp1 || basis.hess.cols + 1 != kp1)
    throw std::invalid_argument("reweight_deflation: inconsistent basis");
  std::size_t k = kp1 - 1;

  DenseMatrix gram(kp1, kp1);
  for (std::size_t i = 0; i < kp1; ++i)
    for (std::size_t j = i; j < kp1; ++j)
      gram(i, j) = gram(j, i) = ip_dot(new_ip, basis.basis_t[i], basis.basis_t[j]);
  DenseMatrix R = cholesky_upper(gram);

  DeflationBasis out;
  // U_new = U_old R^{-1}, column by column
  out.basis_t.resize(kp1);
  for (std::size_t j = 0; j < kp1; ++j) {
    DenseVector u = basis.basis_t[j];
    for (std::size_t i = 0; i < j; ++i) axpy(-R(i, j), out.basis_t[i], u);
    scale(u, 1.0 / R(j, j));
    out.basis_t[j] = std::move(u);
  }
  // H_new = R H R_k^{-1}: T = R*H, then solve row-wise against R_k (upper)
  DenseMatrix T(kp1, k);
  for (std::size_t i = 0; i < kp1; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = i; l < kp1; ++l) s += R(i, l) * basis.hess(l, j);
      T(i, j) = s;
    }
  out.hess = DenseMatrix(kp1, k);
  for (std::size_t i = 0; i < kp1; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = T(i, j);
      for (std::size_t l = 0; l < j; ++l) s -= out.hess(i, l) * R(l, j);
      out.hess(i, j) = s / R(j, j);
    }
  out.rhs_coeffs.assign(kp1, 0.0);
  for (std::size_t i = 0; i < kp1; ++i) {
    double s = 0.0;
    for (std::size_t l = i; l < kp1; ++l) s += R(i, l) * basis.rhs_coeffs[l];
    out.rhs_coeffs[i] = s;
  }
  return out;
}

namespace detail {

inline double frobenius(const SparseMatrix& A) {
  double s = 0.0;
  for (double v : A.values) s += v * v;
  return std::sqrt(s);
}

// Structure checks for a carried deflation basis in the given inner product.
inline void check_deflation(const SparseMatrix& A, const InnerProduct& ip,
                            const DeflationBasis& d, SolveHistory& hist) {
  double orth = 0.0;
  for (std::size_t i = 0; i < d.basis_t.size(); ++i)
    for (std::size_t j = 0; j < d.basis_t.size(); ++j) {
      double v = ip_dot(ip, d.basis_t[i], d.basis_t[j]) - (i == j ? 1.0 : 0.0);
      orth = std::max(orth, std::abs(v));
    }
  hist.max_orthonormality_error = std::max(hist.max_orthonormality_error, orth);

  double anorm = frobenius(A);
  double rec = 0.0;
  for (std::size_t j = 0; j < d.hess.cols; ++j) {
    DenseVector av = ip.transform.forward(matvec(A, ip.transform.adjoint(d.basis_t[j])));
    for (std::size_t i = 0; i < d.basis_t.size(); ++i) axpy(-d.hess(i, j), d.basis_t[i], av);
    rec = std::max(rec, norm2(av));
  }
  hist.max_recurrence_error = std::max(hist.max_recurrence_error, rec / (anorm > 0 ? anorm : 1.0));
}

inline DenseVector represented_residual(const Transform& t, const DeflationBasis& d) {
  DenseVector acc(d.basis_t[0].size(), 0.0);
  for (std::size_t i = 0; i < d.basis_t.size(); ++i) axpy(d.rhs_coeffs[i], d.basis_t[i], acc);
  return t.adjoint(acc);
}

}  // namespace detail

/// GMRES with deflated restarting in a (possibly changing) weighted inner
/// product. Cycle 1 is a plain weighted GMRES cycle of length m; later cycles
/// retain k approximate eigenvectors, convert them to the new inner product
/// by Cholesky reweighting, and extend with m-k Arnoldi steps.
inline SolveHistory solve_dr(const SparseMatrix& A, const DenseVector& b, const DenseVector& x0,
                             const SolveConfig& cfg) {
  if (A.nrows != A.ncols) throw std::invalid_argument("solve_dr: square matrix required");
  if (b.size() != A.nrows || (!x0.empty() && x0.size() != A.nrows))
    throw std::invalid_argument("solve_dr: dimension mismatch");
  if (!(cfg.k_deflate >= 1 && cfg.k_deflate < cfg.m))
    throw std::invalid_argument("solve_dr: need 1 <= k_deflate < m");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve_dr: bad tolerance");

  std::size_t n = A.nrows;
  DenseVector x = x0.empty() ? DenseVector(n, 0.0) : x0;
  DenseVector r = b;
  {
    DenseVector ax = matvec(A, x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  }
  double r0n2 = norm2(r);

  SolveHistory hist;
  if (r0n2 == 0.0) {
    hist.records.push_back({0, 0, 0.0, 0.0});
    hist.converged = true;
    hist.final_x = std::move(x);
    return hist;
  }

  Rng rng(cfg.seed);
  std::size_t mv = 0, cycle = 0;
  bool done = false;
  bool have_deflation = false;
  DeflationBasis carried;

  while (!done) {
    ++cycle;
    Transform t = detail::cycle_transform(cfg, n);
    InnerProduct ip(t, detail::cycle_weights(cfg, t, r, rng));
    hist.cycle_sqrt_weight_range.push_back({ip.min_sqrt_weight(), ip.max_sqrt_weight()});

    ArnoldiDecomposition arn;
    GivensLs ls;
    DenseVector raw_c;
    std::size_t k0 = 0;

    if (!have_deflation) {
      DenseVector r_t = t.forward(r);
      double beta = ip_norm(ip, r_t);
      if (cycle == 1) hist.records.push_back({0, 1, r0n2, beta});
      arn = arnoldi_start(ip, r, cfg.m);
      raw_c = {beta};
      ls.set_rhs(raw_c);
    } else {
      DenseVector before = detail::represented_residual(t, carried);
      DeflationBasis rw = reweight_deflation(carried, ip);
      if (cfg.check_invariants) {
        detail::check_deflation(A, ip, rw, hist);
        DenseVector after = detail::represented_residual(t, rw);
        axpy(-1.0, before, after);
        hist.max_residual_vector_drift = std::max(
            hist.max_residual_vector_drift, norm2(after) / norm2(before));
      }
      k0 = rw.hess.cols;
      arn.basis_t = std::move(rw.basis_t);
      arn.hess = DenseMatrix(cfg.m + 1, cfg.m);
      for (std::size_t i = 0; i <= k0; ++i)
        for (std::size_t j = 0; j < k0; ++j) arn.hess(i, j) = rw.hess(i, j);
      arn.k = k0;
      arn.max_raw_norm = norm2(rw.rhs_coeffs);
      raw_c = rw.rhs_coeffs;
      ls.set_rhs(raw_c);
      for (std::size_t j = 0; j < k0; ++j) {
        DenseVector col(k0 + 1);
        for (std::size_t i = 0; i <= k0; ++i) col[i] = arn.hess(i, j);
        ls.add_column(std::move(col));
      }
    }

    DenseVector y;
    std::size_t j = k0;
    bool completed_cycle = false;
    while (j < cfg.m) {
      ArnoldiStatus status = arnoldi_extend(A, ip, arn);
      ++mv;
      ++j;
      ls.append_rhs_zero();
      raw_c.push_back(0.0);
      DenseVector col(j + 1);
      for (std::size_t i = 0; i <= j; ++i) col[i] = arn.hess(i, j - 1);
      ls.add_column(std::move(col));
      y = ls.solve_y();
      DenseVector z = detail::residual_coeffs(arn.hess, raw_c, y, j + 1);
      double residW = norm2(z);
      double resid2 = detail::resid2_from_coeffs(arn.basis_t, z);
      hist.records.push_back({mv, cycle, resid2, residW});
      if (resid2 <= cfg.tol * r0n2) {
        hist.converged = true;
        done = true;
        break;
      }
      if (status == ArnoldiStatus::Breakdown || mv >= cfg.max_matvec) {
        done = true;
        break;
      }
      if (j == cfg.m) completed_cycle = true;
    }

    if (!y.empty()) {
      DenseVector upd_t(n, 0.0);
      for (std::size_t i = 0; i < y.size(); ++i) axpy(y[i], arn.basis_t[i], upd_t);
      axpy(1.0, t.adjoint(upd_t), x);
    }
    DenseVector ax = matvec(A, x);  // not counted
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    // The explicit residual is authoritative at cycle boundaries (see solve).
    if (norm2(r) <= cfg.tol * r0n2) {
      hist.converged = true;
      done = true;
    }
    if (done) break;
    if (!completed_cycle) continue;

    try {
      carried = dr_restart(arn.basis_t, arn.hess, y, raw_c, cfg.k_deflate);
      have_deflation = true;
      if (cfg.check_invariants) detail::check_deflation(A, ip, carried, hist);
      // diagnostics hook: selected values and real extracted vectors
      hist.last_harmonic_ritz.clear();
      hist.last_harmonic_vectors.clear();
      std::vector<HarmonicRitzPair> hr = harmonic_ritz(arn.hess);
      std::stable_sort(hr.begin(), hr.end(), [](const auto& a, const auto& b) {
        return std::abs(a.value) < std::abs(b.value);
      });
      for (std::size_t q = 0; q < hr.size() && q < cfg.k_deflate; ++q) {
        hist.last_harmonic_ritz.push_back(hr[q].value);
        if (hr[q].value.imag() == 0.0) {
          DenseVector v(n, 0.0);
          for (std::size_t i = 0; i < cfg.m; ++i)
            axpy(hr[q].coeffs[i].real(), arn.basis_t[i], v);
          v = t.adjoint(v);
          double nrm = norm2(v);
          if (nrm > 0) scale(v, 1.0 / nrm);
          hist.last_harmonic_vectors.push_back(std::move(v));
        }
      }
    } catch (const std::exception&) {
      have_deflation = false;  // fall back to an undeflated restart
    }
  }

  hist.final_x = std::move(x);
  hist.matvecs = mv;
  return hist;
}

/// Dispatches to solve or solve_dr per the configured method.
inline SolveHistory run_solver(const SparseMatrix& A, const DenseVector& b,
                               const DenseVector& x0, const SolveConfig& cfg) {
  return method_is_dr(cfg.method) ? solve_dr(A, b, x0, cfg) : solve(A, b, x0, cfg);
}

}  // namespace krylov
