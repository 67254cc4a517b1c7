#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "krylov/vector.hpp"

namespace krylov {

/// Compressed sparse row matrix. Immutable after construction; rows hold
/// strictly increasing column indices.
struct SparseMatrix {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<std::size_t> row_starts;  // length nrows+1
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Builds canonical CSR from coordinate triplets; duplicates are summed.
inline SparseMatrix csr_from_triplets(std::size_t nrows, std::size_t ncols,
                                      std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= nrows || t.col >= ncols)
      throw std::out_of_range("csr_from_triplets: index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });

  SparseMatrix m;
  m.nrows = nrows;
  m.ncols = ncols;
  m.row_starts.assign(nrows + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i + 1;
    double v = triplets[i].value;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      v += triplets[j].value;
      ++j;
    }
    m.col_indices.push_back(triplets[i].col);
    m.values.push_back(v);
    ++m.row_starts[triplets[i].row + 1];
    i = j;
  }
  for (std::size_t r = 0; r < nrows; ++r) m.row_starts[r + 1] += m.row_starts[r];
  return m;
}

/// y = A x, accumulated row-major in floating order.
inline DenseVector matvec(const SparseMatrix& A, const DenseVector& x) {
  if (x.size() != A.ncols) throw std::invalid_argument("matvec: dimension mismatch");
  DenseVector y(A.nrows, 0.0);
  for (std::size_t r = 0; r < A.nrows; ++r) {
    double s = 0.0;
    for (std::size_t k = A.row_starts[r]; k < A.row_starts[r + 1]; ++k)
      s += A.values[k] * x[A.col_indices[k]];
    y[r] = s;
  }
  return y;
}

inline SparseMatrix transpose(const SparseMatrix& A) {
  std::vector<Triplet> t;
  t.reserve(A.nnz());
  for (std::size_t r = 0; r < A.nrows; ++r)
    for (std::size_t k = A.row_starts[r]; k < A.row_starts[r + 1]; ++k)
      t.push_back({A.col_indices[k], r, A.values[k]});
  return csr_from_triplets(A.ncols, A.nrows, std::move(t));
}

inline bool is_symmetric(const SparseMatrix& A, double tol = 0.0) {
  if (A.nrows != A.ncols) return false;
  SparseMatrix At = transpose(A);
  if (At.col_indices != A.col_indices || At.row_starts != A.row_starts) return false;
  for (std::size_t i = 0; i < A.nnz(); ++i)
    if (std::abs(At.values[i] - A.values[i]) > tol) return false;
  return true;
}

/// Parses a Matrix Market coordinate file (real, general or symmetric).
inline SparseMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("matrix market, line " + std::to_string(lineno) + ": " + msg);
  };

  if (!std::getline(in, line)) fail("missing header");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix") fail("not a MatrixMarket matrix");
    if (format != "coordinate") fail("unsupported format qualifier: " + format);
    if (field != "real") fail("unsupported field qualifier: " + field);
    if (symmetry != "general" && symmetry != "symmetric")
      fail("unsupported symmetry qualifier: " + symmetry);
    bool symmetric = (symmetry == "symmetric");

    std::size_t nrows = 0, ncols = 0, nnz = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream ls(line);
      if (!(ls >> nrows >> ncols >> nnz)) fail("malformed size line");
      break;
    }
    if (nrows == 0 && ncols == 0 && nnz == 0 && !in) fail("missing size line");

    std::vector<Triplet> t;
    t.reserve(nnz);
    std::size_t seen = 0;
    while (seen < nnz) {
      if (!std::getline(in, line)) fail("unexpected end of file");
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream ls(line);
      long long r, c;
      double v;
      if (!(ls >> r >> c >> v)) fail("malformed entry line");
      if (r < 1 || c < 1 || static_cast<std::size_t>(r) > nrows ||
          static_cast<std::size_t>(c) > ncols)
        fail("index out of bounds");
      std::size_t ri = static_cast<std::size_t>(r - 1);
      std::size_t ci = static_cast<std::size_t>(c - 1);
      t.push_back({ri, ci, v});
      if (symmetric && ri != ci) t.push_back({ci, ri, v});
      ++seen;
    }
    return csr_from_triplets(nrows, ncols, std::move(t));
  }
}

/// Writes Matrix Market coordinate format; symmetric storage (lower triangle)
/// when the matrix is numerically symmetric.
inline void write_matrix_market(const SparseMatrix& A, std::ostream& out) {
  bool sym = is_symmetric(A);
  out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << "\n";
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (std::size_t r = 0; r < A.nrows; ++r)
    for (std::size_t k = A.row_starts[r]; k < A.row_starts[r + 1]; ++k) {
      std::size_t c = A.col_indices[k];
      if (sym && c > r) continue;
      entries.emplace_back(r, c, A.values[k]);
    }
  out << A.nrows << " " << A.ncols << " " << entries.size() << "\n";
  out.precision(17);
  for (const auto& [r, c, v] : entries) out << (r + 1) << " " << (c + 1) << " " << v << "\n";
}

}  // namespace krylov
