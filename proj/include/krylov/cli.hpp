#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "krylov/diagnostics.hpp"
#include "krylov/generators.hpp"
#include "krylov/gmres_dr.hpp"
#include "krylov/rng.hpp"
#include "krylov/sparse.hpp"

namespace krylov::cli {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

/// Matrix specs: a Matrix Market path, or gen:laplacian2d:N=99,
/// gen:convdiff:N=99, gen:diag:0.01,0.1,3.
inline SparseMatrix parse_matrix_spec(const std::string& spec) {
  if (spec.rfind("gen:", 0) == 0) {
    std::string rest = spec.substr(4);
    auto parse_n = [](const std::string& s) {
      if (s.rfind("N=", 0) != 0) throw std::invalid_argument("matrix spec: expected N=<int>");
      return static_cast<std::size_t>(std::stoull(s.substr(2)));
    };
    if (rest.rfind("laplacian2d:", 0) == 0) return gen_laplacian_2d(parse_n(rest.substr(12)));
    if (rest.rfind("convdiff:", 0) == 0) return gen_convdiff_2d(parse_n(rest.substr(9)));
    if (rest.rfind("diag:", 0) == 0) {
      std::vector<double> d;
      for (const auto& tok : split(rest.substr(5), ',')) d.push_back(std::stod(tok));
      return gen_diag(d);
    }
    throw std::invalid_argument("matrix spec: unknown generator " + rest);
  }
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open matrix file " + spec);
  return parse_matrix_market(in);
}

/// RHS specs: randn:SEED, ones, file:PATH.
inline DenseVector parse_rhs_spec(const std::string& spec, std::size_t n) {
  if (spec.rfind("randn:", 0) == 0)
    return randn_vector(n, std::stoull(spec.substr(6)));
  if (spec == "ones") return DenseVector(n, 1.0);
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw std::runtime_error("cannot open rhs file " + spec.substr(5));
    DenseVector v(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!(in >> v[i])) throw std::runtime_error("rhs file too short");
    return v;
  }
  throw std::invalid_argument("unknown rhs spec " + spec);
}

inline Method parse_method(const std::string& name) {
  if (name == "gmres") return Method::Gmres;
  if (name == "wgmres") return Method::WGmres;
  if (name == "wgmres-dct") return Method::WGmresDct;
  if (name == "gmres-dr") return Method::GmresDr;
  if (name == "wgmres-dr") return Method::WGmresDr;
  if (name == "wgmres-dr-dct") return Method::WGmresDrDct;
  throw std::invalid_argument("unknown method " + name);
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::Gmres: return "gmres";
    case Method::WGmres: return "wgmres";
    case Method::WGmresDct: return "wgmres-dct";
    case Method::GmresDr: return "gmres-dr";
    case Method::WGmresDr: return "wgmres-dr";
    case Method::WGmresDrDct: return "wgmres-dr-dct";
  }
  return "?";
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// History CSV: one row per matvec, norms relative to their initial values.
inline void write_history_csv(const SolveHistory& hist, std::ostream& out) {
  out << "matvec,cycle,resid2,residW\n";
  double r2_0 = hist.records.empty() ? 1.0 : hist.records.front().resid2;
  double rw_0 = hist.records.empty() ? 1.0 : hist.records.front().residW;
  if (r2_0 == 0.0) r2_0 = 1.0;
  if (rw_0 == 0.0) rw_0 = 1.0;
  for (const auto& rec : hist.records) {
    if (rec.matvec == 0) continue;
    out << rec.matvec << "," << rec.cycle << "," << fmt17(rec.resid2 / r2_0) << ","
        << fmt17(rec.residW / rw_0) << "\n";
  }
}

struct RunSummary {
  std::string method;
  std::size_t m = 0;
  std::size_t k = 0;
  double power = 1.0;
  std::uint64_t seed = 0;
  std::size_t matvecs = 0;
  bool converged = false;
  double final_rel_resid2 = 0.0;
  double wall_seconds = 0.0;
};

inline nlohmann::json summary_json(const RunSummary& s) {
  return {{"method", s.method},   {"m", s.m},
          {"k", s.k},             {"power", s.power},
          {"seed", s.seed},       {"matvecs", s.matvecs},
          {"converged", s.converged}, {"final_rel_resid2", s.final_rel_resid2},
          {"wall_seconds", s.wall_seconds}};
}

inline RunSummary run_one(const SparseMatrix& A, const DenseVector& b, const SolveConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  SolveHistory hist = run_solver(A, b, {}, cfg);
  auto t1 = std::chrono::steady_clock::now();
  RunSummary s;
  s.method = method_name(cfg.method);
  s.m = cfg.m;
  s.k = cfg.k_deflate;
  s.power = cfg.power;
  s.seed = cfg.seed;
  s.matvecs = hist.matvecs;
  s.converged = hist.converged;
  double r0 = hist.records.empty() ? 1.0 : hist.records.front().resid2;
  s.final_rel_resid2 = hist.records.empty() || r0 == 0.0
                           ? 0.0
                           : hist.records.back().resid2 / r0;
  s.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return s;
}

struct SolveArgs {
  std::string matrix;
  std::string rhs = "randn:0";
  std::string method = "gmres";
  std::size_t m = 30;
  std::size_t k = 0;
  double power = 1.0;
  std::optional<std::string> random_weights;  // "LO,HI"
  double tol = 1e-8;
  std::size_t max_matvec = 20000;
  std::uint64_t seed = 0;
  std::string history_path;
  std::string summary_path;
};

inline int cmd_solve(const SolveArgs& args, std::ostream& err) {
  try {
    SparseMatrix A = parse_matrix_spec(args.matrix);
    if (A.nrows != A.ncols) throw std::invalid_argument("matrix must be square");
    DenseVector b = parse_rhs_spec(args.rhs, A.nrows);
    SolveConfig cfg;
    cfg.method = parse_method(args.method);
    cfg.m = args.m;
    cfg.k_deflate = args.k;
    cfg.power = args.power;
    cfg.tol = args.tol;
    cfg.max_matvec = args.max_matvec;
    cfg.seed = args.seed;
    if (args.random_weights) {
      auto parts = split(*args.random_weights, ',');
      if (parts.size() != 2) throw std::invalid_argument("--random-weights expects LO,HI");
      cfg.random_weight_range = {std::stod(parts[0]), std::stod(parts[1])};
    }
    auto t0 = std::chrono::steady_clock::now();
    SolveHistory hist = run_solver(A, b, {}, cfg);
    auto t1 = std::chrono::steady_clock::now();
    if (!args.history_path.empty()) {
      std::ofstream out(args.history_path);
      if (!out) throw std::runtime_error("cannot write " + args.history_path);
      write_history_csv(hist, out);
    }
    if (!args.summary_path.empty()) {
      RunSummary s;
      s.method = args.method;
      s.m = cfg.m;
      s.k = cfg.k_deflate;
      s.power = cfg.power;
      s.seed = cfg.seed;
      s.matvecs = hist.matvecs;
      s.converged = hist.converged;
      double r0 = hist.records.empty() ? 1.0 : hist.records.front().resid2;
      s.final_rel_resid2 =
          hist.records.empty() || r0 == 0.0 ? 0.0 : hist.records.back().resid2 / r0;
      s.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
      std::ofstream out(args.summary_path);
      if (!out) throw std::runtime_error("cannot write " + args.summary_path);
      out << summary_json(s).dump(2) << "\n";
    }
    return hist.converged ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct CompareArgs {
  std::string matrix;
  std::string rhs = "randn:0";
  std::vector<std::string> methods;
  std::vector<std::size_t> m_list;
  std::vector<double> power_list{1.0};
  std::vector<std::uint64_t> seeds{0};
  std::size_t k = 0;
  double tol = 1e-8;
  std::size_t max_matvec = 20000;
  std::string out_path;
};

inline int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.methods.empty()) throw std::invalid_argument("empty methods list");
    if (args.m_list.empty()) throw std::invalid_argument("empty m list");
    SparseMatrix A = parse_matrix_spec(args.matrix);
    if (A.nrows != A.ncols) throw std::invalid_argument("matrix must be square");

    nlohmann::json runs = nlohmann::json::array();
    nlohmann::json aggregates = nlohmann::json::array();
    for (const auto& mth : args.methods)
      for (std::size_t m : args.m_list)
        for (double p : args.power_list) {
          std::vector<std::size_t> counts;
          for (std::uint64_t seed : args.seeds) {
            DenseVector b = args.rhs.rfind("randn:", 0) == 0 ? randn_vector(A.nrows, seed)
                                                            : parse_rhs_spec(args.rhs, A.nrows);
            SolveConfig cfg;
            cfg.method = parse_method(mth);
            cfg.m = m;
            cfg.k_deflate = args.k;
            cfg.power = p;
            cfg.tol = args.tol;
            cfg.max_matvec = args.max_matvec;
            cfg.seed = seed;
            RunSummary s = run_one(A, b, cfg);
            counts.push_back(s.matvecs);
            runs.push_back(summary_json(s));
          }
          std::vector<std::size_t> sorted = counts;
          std::sort(sorted.begin(), sorted.end());
          double median = sorted.size() % 2 == 1
                              ? static_cast<double>(sorted[sorted.size() / 2])
                              : 0.5 * static_cast<double>(sorted[sorted.size() / 2 - 1] +
                                                          sorted[sorted.size() / 2]);
          double mean = 0.0;
          for (std::size_t c : counts) mean += static_cast<double>(c);
          mean /= static_cast<double>(counts.size());
          aggregates.push_back({{"method", mth},
                                {"m", m},
                                {"power", p},
                                {"median_matvecs", median},
                                {"mean_matvecs", mean}});
        }
    nlohmann::json doc = {{"runs", runs}, {"aggregates", aggregates}};
    if (!args.out_path.empty()) {
      std::ofstream f(args.out_path);
      if (!f) throw std::runtime_error("cannot write " + args.out_path);
      f << doc.dump(2) << "\n";
    } else {
      out << doc.dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct LocpArgs {
  std::string eigvecs;  // file path or gen:laplacian2d:N=99:seed=S
  std::string p_list = "1..40";
  std::string transform = "none";
};

inline std::vector<std::size_t> parse_p_list(const std::string& s) {
  std::vector<std::size_t> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    std::size_t lo = std::stoull(s.substr(0, dots));
    std::size_t hi = std::stoull(s.substr(dots + 2));
    for (std::size_t p = lo; p <= hi; ++p) out.push_back(p);
  } else {
    for (const auto& tok : split(s, ',')) out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty p list");
  return out;
}

inline int cmd_locp(const LocpArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::size_t> ps = parse_p_list(args.p_list);
    std::size_t pmax = *std::max_element(ps.begin(), ps.end());

    std::vector<EigenPair> pairs;
    if (args.eigvecs.rfind("gen:laplacian2d:", 0) == 0) {
      auto parts = split(args.eigvecs.substr(16), ':');
      if (parts.size() != 2 || parts[0].rfind("N=", 0) != 0 || parts[1].rfind("seed=", 0) != 0)
        throw std::invalid_argument("expected gen:laplacian2d:N=<int>:seed=<int>");
      std::size_t N = std::stoull(parts[0].substr(2));
      std::uint64_t seed = std::stoull(parts[1].substr(5));
      pairs = laplacian_2d_eigenpairs(N, pmax, randn_vector(N * N, seed));
    } else {
      pairs = read_eigvecs_file(args.eigvecs);
    }

    std::vector<DenseVector> vecs;
    for (auto& p : pairs) vecs.push_back(std::move(p.vector));
    if (args.transform == "dct") {
      Transform t = Transform::cosine(vecs[0].size());
      vecs = transform_eigvecs(vecs, t);
    } else if (args.transform != "none") {
      throw std::invalid_argument("unknown transform " + args.transform);
    }

    for (std::size_t p : ps) out << p << " " << fmt17(loc_p(vecs, p)) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct GenArgs {
  std::string matrix;
  std::string out_path;
};

inline int cmd_gen(const GenArgs& args, std::ostream& err) {
  try {
    SparseMatrix A = parse_matrix_spec(args.matrix);
    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot write " + args.out_path);
    write_matrix_market(A, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace krylov::cli
