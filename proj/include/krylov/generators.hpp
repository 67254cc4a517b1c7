#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "krylov/sparse.hpp"
#include "krylov/vector.hpp"

namespace krylov {

/// 5-point Dirichlet Laplacian on the unit square, N interior points per side,
/// lexicographic (row-major) grid ordering. Entries are the raw stencil
/// (diagonal 4, neighbors -1); no 1/h^2 scaling.
inline SparseMatrix gen_laplacian_2d(std::size_t N) {
  if (N < 1) throw std::invalid_argument("gen_laplacian_2d: N >= 1 required");
  std::size_t n = N * N;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  for (std::size_t iy = 0; iy < N; ++iy)
    for (std::size_t ix = 0; ix < N; ++ix) {
      std::size_t i = iy * N + ix;
      t.push_back({i, i, 4.0});
      if (ix > 0) t.push_back({i, i - 1, -1.0});
      if (ix + 1 < N) t.push_back({i, i + 1, -1.0});
      if (iy > 0) t.push_back({i, i - N, -1.0});
      if (iy + 1 < N) t.push_back({i, i + N, -1.0});
    }
  return csr_from_triplets(n, n, std::move(t));
}

/// Centered-difference discretization of -(u_xx + u_yy) + u_x on the unit
/// square (Dirichlet), scaled by h^2 with h = 1/(N+1): diagonal 4, x-neighbors
/// -1 +- h/2, y-neighbors -1.
inline SparseMatrix gen_convdiff_2d(std::size_t N) {
  if (N < 2) throw std::invalid_argument("gen_convdiff_2d: N >= 2 required");
  double h = 1.0 / static_cast<double>(N + 1);
  double east = -1.0 + h / 2.0;
  double west = -1.0 - h / 2.0;
  std::size_t n = N * N;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  for (std::size_t iy = 0; iy < N; ++iy)
    for (std::size_t ix = 0; ix < N; ++ix) {
      std::size_t i = iy * N + ix;
      t.push_back({i, i, 4.0});
      if (ix > 0) t.push_back({i, i - 1, west});
      if (ix + 1 < N) t.push_back({i, i + 1, east});
      if (iy > 0) t.push_back({i, i - N, -1.0});
      if (iy + 1 < N) t.push_back({i, i + N, -1.0});
    }
  return csr_from_triplets(n, n, std::move(t));
}

inline SparseMatrix gen_diag(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("gen_diag: empty diagonal");
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) t.push_back({i, i, values[i]});
  return csr_from_triplets(values.size(), values.size(), std::move(t));
}

struct EigenPair {
  double value = 0.0;
  DenseVector vector;  // unit 2-norm
};

/// Analytic eigenpairs of gen_laplacian_2d(N), sorted ascending by magnitude.
/// A repeated eigenvalue contributes its full multiplicity: the returned
/// vectors are an orthonormal basis of the eigenspace whose first member is
/// the normalized projection of `reference` onto that space (the component a
/// Krylov process started from `reference` can reach), completed by
/// Gram-Schmidt over the analytic tensor modes.
inline std::vector<EigenPair> laplacian_2d_eigenpairs(std::size_t N, std::size_t count_wanted,
                                                      const DenseVector& reference) {
  std::size_t n = N * N;
  if (reference.size() != n)
    throw std::invalid_argument("laplacian_2d_eigenpairs: reference has wrong dimension");
  if (count_wanted > n)
    throw std::invalid_argument("laplacian_2d_eigenpairs: count_wanted > N^2");

  struct Mode {
    double lambda;
    std::size_t j, k;
  };
  std::vector<Mode> modes;
  modes.reserve(n);
  double denom = static_cast<double>(N + 1);
  for (std::size_t j = 1; j <= N; ++j)
    for (std::size_t k = 1; k <= N; ++k) {
      double lam = 4.0 - 2.0 * std::cos(j * std::numbers::pi / denom) -
                   2.0 * std::cos(k * std::numbers::pi / denom);
      modes.push_back({lam, j, k});
    }
  std::sort(modes.begin(), modes.end(),
            [](const Mode& a, const Mode& b) { return std::abs(a.lambda) < std::abs(b.lambda); });

  auto mode_vector = [&](const Mode& m) {
    DenseVector v(n);
    for (std::size_t iy = 0; iy < N; ++iy)
      for (std::size_t ix = 0; ix < N; ++ix)
        v[iy * N + ix] = std::sin(m.j * (ix + 1) * std::numbers::pi / denom) *
                         std::sin(m.k * (iy + 1) * std::numbers::pi / denom);
    scale(v, 1.0 / norm2(v));
    return v;
  };

  std::vector<EigenPair> out;
  std::size_t i = 0;
  while (i < modes.size() && out.size() < count_wanted) {
    std::size_t g = i + 1;
    while (g < modes.size() &&
           std::abs(modes[g].lambda - modes[i].lambda) <= 1e-9 * (1.0 + std::abs(modes[i].lambda)))
      ++g;
    if (g == i + 1) {
      out.push_back({modes[i].lambda, mode_vector(modes[i])});
    } else {
      std::vector<DenseVector> group;
      for (std::size_t q = i; q < g; ++q) group.push_back(mode_vector(modes[q]));
      DenseVector proj(n, 0.0);
      for (const auto& v : group) axpy(dot(reference, v), v, proj);
      double nrm = norm2(proj);
      if (nrm <= 1e-14 * norm2(reference))
        throw std::runtime_error(
            "laplacian_2d_eigenpairs: reference orthogonal to a degenerate eigenspace");
      scale(proj, 1.0 / nrm);
      std::vector<DenseVector> basis{std::move(proj)};
      for (auto& v : group) {
        if (basis.size() == group.size()) break;
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& u : basis) axpy(-dot(v, u), u, v);
        double vn = norm2(v);
        if (vn <= 1e-10) continue;  // this mode is (nearly) the projection itself
        scale(v, 1.0 / vn);
        basis.push_back(std::move(v));
      }
      if (basis.size() != group.size())
        throw std::runtime_error("laplacian_2d_eigenpairs: degenerate basis completion failed");
      for (auto& v : basis) out.push_back({modes[i].lambda, std::move(v)});
    }
    i = g;
  }
  out.resize(count_wanted);
  return out;
}

}  // namespace krylov
