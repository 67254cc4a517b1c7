#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "krylov/diagnostics.hpp"
#include "krylov/generators.hpp"
#include "krylov/gmres.hpp"
#include "krylov/gmres_dr.hpp"

using namespace krylov;

namespace {

SparseMatrix random_sparse(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i == j || rng.uniform01() < 0.4) t.push_back({i, j, rng.normal() + (i == j ? 4.0 : 0.0)});
  return csr_from_triplets(n, n, std::move(t));
}

// Runs GMRES(1)/W-GMRES(1) cycle by cycle, collecting each cycle's residual
// polynomial root. Independent of the solve() driver's bookkeeping.
std::vector<double> m1_cycle_roots(const SparseMatrix& A, const DenseVector& b, bool weighted,
                                   std::size_t cycles) {
  std::size_t n = A.nrows;
  DenseVector x(n, 0.0), r = b;
  std::vector<double> roots;
  for (std::size_t c = 0; c < cycles; ++c) {
    DenseVector w = weighted ? weights_from_residual(r, 1.0) : DenseVector(n, 1.0);
    InnerProduct ip(Transform::identity(n), w);
    ArnoldiDecomposition arn = arnoldi_start(ip, r, 1);
    double beta = ip_norm(ip, r);
    arnoldi_extend(A, ip, arn);
    DenseMatrix hb(2, 1);
    hb(0, 0) = arn.hess(0, 0);
    hb(1, 0) = arn.hess(1, 0);
    roots.push_back(cycle_poly_roots(hb)[0].real());
    double h00 = hb(0, 0), h10 = hb(1, 0);
    double y = h00 * beta / (h00 * h00 + h10 * h10);
    axpy(y, arn.basis_t[0], x);
    DenseVector ax = matvec(A, x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  }
  return roots;
}

}  // namespace

TEST_CASE("identity system converges in one matvec") {
  SparseMatrix I = csr_from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  SolveConfig cfg;
  cfg.m = 5;
  SolveHistory h = solve(I, {1.0, -2.0, 0.5}, {}, cfg);
  REQUIRE(h.converged);
  REQUIRE(h.matvecs == 1);
  REQUIRE(h.records.back().resid2 < 1e-12);
}

TEST_CASE("zero right-hand side is trivially converged") {
  SparseMatrix I = csr_from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  SolveConfig cfg;
  SolveHistory h = solve(I, {0.0, 0.0}, {}, cfg);
  REQUIRE(h.converged);
  REQUIRE(h.matvecs == 0);
}

TEST_CASE("restarted GMRES(1) on diag(2,1)") {
  SparseMatrix A = csr_from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 1.0}});
  DenseVector b{1.0, 1.0};
  SolveConfig cfg;
  cfg.m = 1;
  cfg.tol = 1e-8;

  SECTION("unweighted converges in 16 matvecs with roots 5/3, 4/3") {
    cfg.method = Method::Gmres;
    SolveHistory h = solve(A, b, {}, cfg);
    REQUIRE(h.converged);
    REQUIRE(h.matvecs == 16);
    std::vector<double> roots = m1_cycle_roots(A, b, false, 6);
    for (std::size_t c = 0; c < roots.size(); ++c)
      REQUIRE_THAT(roots[c], Catch::Matchers::WithinAbs(c % 2 == 0 ? 5.0 / 3.0 : 4.0 / 3.0, 1e-12));
  }
  SECTION("weighted converges in 7 matvecs with the published root sequence") {
    cfg.method = Method::WGmres;
    SolveHistory h = solve(A, b, {}, cfg);
    REQUIRE(h.converged);
    REQUIRE(h.matvecs == 7);
    std::vector<double> roots = m1_cycle_roots(A, b, true, 5);
    double expected[] = {1.667, 1.200, 1.941, 1.0039, 1.999985};
    for (std::size_t c = 0; c < 5; ++c)
      REQUIRE_THAT(roots[c], Catch::Matchers::WithinRel(expected[c], 5e-4));
  }
}

TEST_CASE("gmres1_root closed forms") {
  REQUIRE_THAT(gmres1_root(0.1, 0.1, false), Catch::Matchers::WithinRel(0.1818, 5e-4));
  REQUIRE_THAT(gmres1_root(0.1, 0.1, true), Catch::Matchers::WithinRel(0.1089, 5e-4));
  REQUIRE(gmres1_root(1.0, 0.0, false) == 1.0);
  REQUIRE_THROWS_AS(gmres1_root(0.0, 1.0, false), std::invalid_argument);
  // cross-check against a computed cycle root on diag(lambda, 1)
  for (bool weighted : {false, true}) {
    SparseMatrix A = gen_diag({0.1, 1.0});
    DenseVector b{1.0, 0.1};  // unit component on lambda, beta = 0.1 on 1
    double root = m1_cycle_roots(A, b, weighted, 1)[0];
    REQUIRE_THAT(root, Catch::Matchers::WithinAbs(gmres1_root(0.1, 0.1, weighted), 1e-10));
  }
}

TEST_CASE("constructed stagnation example") {
  // A = [[1,-4],[0,5]], r0 = [1, (5+sqrt(5))/10]: the weighted first step
  // satisfies r0' S^2 A r0 = 0, so W-GMRES(1) cannot move.
  SparseMatrix A = csr_from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -4.0}, {1, 1, 5.0}});
  double c = (5.0 + std::sqrt(5.0)) / 10.0;
  DenseVector r0{1.0, c};

  DenseVector w = weights_from_residual(r0, 1.0);
  DenseVector ar = matvec(A, r0);
  double obstruction = w[0] * r0[0] * ar[0] + w[1] * r0[1] * ar[1];
  REQUIRE(std::abs(obstruction) <= 1e-12);

  SolveConfig cfg;
  cfg.method = Method::WGmres;
  cfg.m = 1;
  cfg.max_matvec = 8;
  SolveHistory h = solve(A, r0, {}, cfg);
  REQUIRE_FALSE(h.converged);
  double first = h.records.front().resid2;
  for (const auto& rec : h.records)
    REQUIRE_THAT(rec.resid2, Catch::Matchers::WithinAbs(first, 1e-12 * first));
}

TEST_CASE("fixed-weight W-GMRES is plain GMRES on the similarity transform") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::size_t n = 10 + 4 * (seed % 5);
    SparseMatrix A = random_sparse(n, seed);
    DenseVector b = randn_vector(n, 1000 + seed);
    Rng rng(2000 + seed);
    DenseVector w = random_weights(n, 0.3, 3.0, rng);

    SolveConfig wc;
    wc.method = Method::WGmres;
    wc.m = 6;
    wc.tol = 1e-12;
    wc.max_matvec = 18;
    wc.fixed_weights = w;
    SolveHistory hw = solve(A, b, {}, wc);

    // B = S A S^{-1}, rhs = S b, plain 2-norm GMRES
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = A.row_starts[i]; k < A.row_starts[i + 1]; ++k)
        t.push_back({i, A.col_indices[k],
                     std::sqrt(w[i]) * A.values[k] / std::sqrt(w[A.col_indices[k]])});
    SparseMatrix B = csr_from_triplets(n, n, std::move(t));
    DenseVector sb(n);
    for (std::size_t i = 0; i < n; ++i) sb[i] = std::sqrt(w[i]) * b[i];
    SolveConfig pc;
    pc.method = Method::Gmres;
    pc.m = 6;
    pc.tol = 1e-12;
    pc.max_matvec = 18;
    SolveHistory hp = solve(B, sb, {}, pc);

    std::size_t cnt = std::min(hw.records.size(), hp.records.size());
    REQUIRE(cnt >= 10);
    for (std::size_t i = 0; i < cnt; ++i)
      REQUIRE_THAT(hw.records[i].residW,
                   Catch::Matchers::WithinRel(hp.records[i].resid2, 1e-8));
  }
}

TEST_CASE("cycle-final residW matches the brute-force polynomial minimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::size_t n = 6 + seed % 7;  // up to 12
    std::size_t m = 2 + seed % 3;  // up to 4
    Rng rng(seed);
    std::vector<double> d(n);
    for (double& v : d) v = 0.1 + 3.0 * rng.uniform01();
    SparseMatrix A = gen_diag(d);
    DenseVector b = randn_vector(n, 300 + seed);
    DenseVector w = random_weights(n, 0.25, 1.0, rng);

    SolveConfig cfg;
    cfg.method = Method::WGmres;
    cfg.m = m;
    cfg.tol = 1e-14;
    cfg.max_matvec = m;  // exactly one cycle
    cfg.fixed_weights = w;
    SolveHistory h = solve(A, b, {}, cfg);
    double residW = h.records.back().residW;

    // minimize || S(b - A q(A) b) ||_2 over polynomials q of degree m-1
    DenseMatrix G(m, m);
    std::vector<double> rhs(m, 0.0);
    double t2 = 0.0;
    auto col = [&](std::size_t i, std::size_t j) {  // entry j of S*Lambda^i*b
      return std::sqrt(w[j]) * std::pow(d[j], static_cast<double>(i)) * b[j];
    };
    for (std::size_t j = 0; j < n; ++j) t2 += col(0, j) * col(0, j);
    for (std::size_t p = 1; p <= m; ++p) {
      for (std::size_t q = 1; q <= m; ++q) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += col(p, j) * col(q, j);
        G(p - 1, q - 1) = s;
      }
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += col(p, j) * col(0, j);
      rhs[p - 1] = s;
    }
    std::vector<double> a = dense_solve(G, rhs);
    double min2 = t2;
    for (std::size_t p = 0; p < m; ++p) min2 -= rhs[p] * a[p];
    REQUIRE_THAT(residW * residW, Catch::Matchers::WithinRel(min2, 1e-8));
  }
}

TEST_CASE("degenerate-consistency: p=0 weighting and identity-transform DCT") {
  SparseMatrix A = gen_convdiff_2d(5);
  DenseVector b = randn_vector(25, 13);
  SolveConfig base;
  base.m = 7;
  base.tol = 1e-10;
  base.max_matvec = 100;

  SolveConfig g = base;
  g.method = Method::Gmres;
  SolveHistory hg = solve(A, b, {}, g);

  SECTION("power 0 W-GMRES equals GMRES") {
    SolveConfig w = base;
    w.method = Method::WGmres;
    w.power = 0.0;
    SolveHistory hw = solve(A, b, {}, w);
    REQUIRE(hw.records.size() == hg.records.size());
    for (std::size_t i = 0; i < hg.records.size(); ++i) {
      REQUIRE_THAT(hw.records[i].resid2,
                   Catch::Matchers::WithinRel(hg.records[i].resid2, 1e-12));
      REQUIRE_THAT(hw.records[i].residW,
                   Catch::Matchers::WithinRel(hg.records[i].residW, 1e-12));
    }
  }
  SECTION("identity-transform W-GMRES-DCT equals W-GMRES") {
    SolveConfig w = base;
    w.method = Method::WGmres;
    SolveHistory hw = solve(A, b, {}, w);
    SolveConfig d = base;
    d.method = Method::WGmresDct;
    d.transform_override = TransformKind::Identity;
    SolveHistory hd = solve(A, b, {}, d);
    REQUIRE(hd.records.size() == hw.records.size());
    for (std::size_t i = 0; i < hw.records.size(); ++i)
      REQUIRE_THAT(hd.records[i].resid2,
                   Catch::Matchers::WithinRel(hw.records[i].resid2, 1e-12));
  }
}

TEST_CASE("residW is nonincreasing within cycles; sandwich bound holds") {
  SparseMatrix A = gen_diag({0.01, 0.1, 3, 4, 5, 6, 7, 8, 9, 10});
  DenseVector b = randn_vector(10, 21);
  SolveConfig cfg;
  cfg.method = Method::WGmres;
  cfg.m = 3;
  cfg.max_matvec = 400;
  SolveHistory h = solve(A, b, {}, cfg);
  REQUIRE(h.converged);
  for (std::size_t i = 1; i < h.records.size(); ++i)
    if (h.records[i].cycle == h.records[i - 1].cycle)
      REQUIRE(h.records[i].residW <= h.records[i - 1].residW * (1.0 + 1e-12));
  REQUIRE(sandwich_check_all(h));
}

TEST_CASE("weighting can break 2-norm monotonicity across a run") {
  // Not an invariant of the method, just a negative control that resid2 is
  // genuinely the 2-norm and not the (monotone) W-norm in disguise.
  SparseMatrix A = gen_diag({0.01, 0.1, 3, 4, 5, 6, 7, 8, 9, 10});
  DenseVector b = randn_vector(10, 2);
  SolveConfig cfg;
  cfg.method = Method::WGmres;
  cfg.m = 3;
  cfg.max_matvec = 400;
  SolveHistory h = solve(A, b, {}, cfg);
  bool bumped = false;
  for (std::size_t i = 1; i < h.records.size(); ++i)
    if (h.records[i].resid2 > h.records[i - 1].resid2 * (1.0 + 1e-14)) bumped = true;
  REQUIRE(bumped);
}

TEST_CASE("W-GMRES(3) tames the small-eigenvalue residual components") {
  // The targeting cycle varies with r0; this seed has one inside 8 cycles.
  SparseMatrix A = gen_diag({0.01, 0.1, 3, 4, 5, 6, 7, 8, 9, 10});
  DenseVector b = randn_vector(10, 9);
  double prev = std::abs(b[0]);
  bool big_drop = false;
  for (std::size_t cycles = 1; cycles <= 8; ++cycles) {
    SolveConfig cfg;
    cfg.method = Method::WGmres;
    cfg.m = 3;
    cfg.max_matvec = 3 * cycles;
    cfg.tol = 1e-14;
    SolveHistory h = solve(A, b, {}, cfg);
    DenseVector r = matvec(A, h.final_x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    double comp = residual_eigencomponents(r)[0];
    if (comp <= 1e-2 * prev) big_drop = true;
    prev = comp;
  }
  REQUIRE(big_drop);
}

TEST_CASE("budget exhaustion reports not converged") {
  SparseMatrix A = gen_laplacian_2d(6);
  DenseVector b = randn_vector(36, 8);
  SolveConfig cfg;
  cfg.m = 4;
  cfg.max_matvec = 8;
  SolveHistory h = solve(A, b, {}, cfg);
  REQUIRE_FALSE(h.converged);
  REQUIRE(h.matvecs == 8);
  REQUIRE(h.records.back().matvec == 8);
}
