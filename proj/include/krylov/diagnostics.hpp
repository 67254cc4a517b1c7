#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "krylov/generators.hpp"
#include "krylov/gmres.hpp"
#include "krylov/gmres_dr.hpp"
#include "krylov/transform.hpp"

namespace krylov {

/// Localization of the p smallest-magnitude eigenvectors: concentration of
/// each vector's mass in its p largest-magnitude entries (ties broken by
/// lowest index), averaged in root-mean-square over the first p vectors.
inline double loc_p(const std::vector<DenseVector>& eigvecs, std::size_t p) {
  if (p == 0) throw std::invalid_argument("loc_p: p must be >= 1");
  if (p > eigvecs.size()) throw std::invalid_argument("loc_p: p exceeds eigenvector count");
  double total = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const DenseVector& v = eigvecs[j];
    if (p > v.size()) throw std::invalid_argument("loc_p: p exceeds dimension");
    std::vector<double> mags(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
    std::nth_element(mags.begin(), mags.begin() + (p - 1), mags.end(), std::greater<double>());
    for (std::size_t i = 0; i < p; ++i) total += mags[i] * mags[i];
  }
  return std::sqrt(total) / std::sqrt(static_cast<double>(p));
}

inline std::vector<DenseVector> transform_eigvecs(const std::vector<DenseVector>& eigvecs,
                                                  const Transform& t) {
  std::vector<DenseVector> out;
  out.reserve(eigvecs.size());
  for (const auto& v : eigvecs) out.push_back(t.forward(v));
  return out;
}

/// Verifies the norm sandwich residW/s_max <= resid2 <= residW/s_min on every
/// record, with a relative slack of 1e-10.
inline bool sandwich_check(const SolveHistory& hist, double s_min, double s_max) {
  for (const auto& rec : hist.records) {
    if (!(rec.residW / s_max <= rec.resid2 * (1.0 + 1e-10))) return false;
    if (!(rec.resid2 <= rec.residW / s_min * (1.0 + 1e-10))) return false;
  }
  return true;
}

/// Same bound, using the per-cycle weight extremes recorded in the history.
inline bool sandwich_check_all(const SolveHistory& hist) {
  for (const auto& rec : hist.records) {
    if (rec.cycle == 0 || rec.cycle > hist.cycle_sqrt_weight_range.size()) continue;
    auto [s_min, s_max] = hist.cycle_sqrt_weight_range[rec.cycle - 1];
    if (!(rec.residW / s_max <= rec.resid2 * (1.0 + 1e-10))) return false;
    if (!(rec.resid2 <= rec.residW / s_min * (1.0 + 1e-10))) return false;
  }
  return true;
}

/// Reads eigenpairs from text: first line "n k", then k lines of lambda
/// followed by n entries of a unit 2-norm vector. Output is sorted by |lambda|
/// ascending; vectors within 1e-6 of unit norm are renormalized.
inline std::vector<EigenPair> read_eigvecs(std::istream& in) {
  std::size_t n = 0, k = 0;
  if (!(in >> n >> k)) throw std::runtime_error("eigvecs: malformed header line");
  std::vector<EigenPair> pairs(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(in >> pairs[j].value)) throw std::runtime_error("eigvecs: malformed eigenvalue");
    pairs[j].vector.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!(in >> pairs[j].vector[i])) throw std::runtime_error("eigvecs: malformed vector entry");
    double nrm = norm2(pairs[j].vector);
    if (std::abs(nrm - 1.0) > 1e-6)
      throw std::runtime_error("eigvecs: vector is not unit 2-norm");
    scale(pairs[j].vector, 1.0 / nrm);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.value) < std::abs(b.value);
  });
  return pairs;
}

inline std::vector<EigenPair> read_eigvecs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("eigvecs: cannot open " + path);
  return read_eigvecs(in);
}

inline void write_eigvecs(const std::vector<EigenPair>& pairs, std::ostream& out) {
  std::size_t n = pairs.empty() ? 0 : pairs[0].vector.size();
  out.precision(17);
  out << n << " " << pairs.size() << "\n";
  for (const auto& p : pairs) {
    out << p.value;
    for (double v : p.vector) out << " " << v;
    out << "\n";
  }
}

}  // namespace krylov
