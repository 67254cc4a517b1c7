#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krylov/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse GMRES solvers with weighted inner products"};
  app.require_subcommand(1);

  krylov::cli::SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run a single solver configuration");
  solve->add_option("--matrix", sa.matrix, "Matrix Market path or gen:<spec>")->required();
  solve->add_option("--rhs", sa.rhs, "randn:SEED | ones | file:PATH");
  solve->add_option("--method", sa.method,
                    "gmres|wgmres|wgmres-dct|gmres-dr|wgmres-dr|wgmres-dr-dct");
  solve->add_option("--m", sa.m, "Restart length");
  solve->add_option("--k", sa.k, "Deflation subspace size (DR methods)");
  solve->add_option("--power", sa.power, "Residual-weight exponent");
  std::string rw;
  solve->add_option("--random-weights", rw, "LO,HI uniform weights per cycle");
  solve->add_option("--tol", sa.tol, "Relative residual tolerance");
  solve->add_option("--max-matvec", sa.max_matvec, "Matrix-vector product budget");
  solve->add_option("--seed", sa.seed, "Random-weight stream seed");
  solve->add_option("--history", sa.history_path, "Write per-matvec CSV here");
  solve->add_option("--summary", sa.summary_path, "Write run summary JSON here");

  krylov::cli::CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Sweep methods/parameters over seeds");
  compare->add_option("--matrix", ca.matrix, "Matrix Market path or gen:<spec>")->required();
  compare->add_option("--rhs", ca.rhs, "randn:SEED template | ones | file:PATH");
  compare->add_option("--methods", ca.methods, "Method names")->required()->delimiter(',');
  compare->add_option("--m-list", ca.m_list, "Restart lengths")->required()->delimiter(',');
  compare->add_option("--power-list", ca.power_list, "Weight exponents")->delimiter(',');
  compare->add_option("--seeds", ca.seeds, "Seeds (drive rhs and weights)")->delimiter(',');
  compare->add_option("--k", ca.k, "Deflation subspace size");
  compare->add_option("--tol", ca.tol, "Relative residual tolerance");
  compare->add_option("--max-matvec", ca.max_matvec, "Matrix-vector product budget");
  compare->add_option("--out", ca.out_path, "Write comparison JSON here (default stdout)");

  krylov::cli::LocpArgs la;
  auto* locp = app.add_subcommand("locp", "Eigenvector localization profile");
  locp->add_option("--eigvecs", la.eigvecs,
                   "Eigenpair file or gen:laplacian2d:N=<int>:seed=<int>")
      ->required();
  locp->add_option("--p-list", la.p_list, "p values: LO..HI or comma list");
  locp->add_option("--transform", la.transform, "none|dct");

  krylov::cli::GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Write a generated matrix as Matrix Market");
  gen->add_option("--matrix", ga.matrix, "gen:<spec>")->required();
  gen->add_option("--out", ga.out_path, "Output .mtx path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (solve->parsed()) {
    if (!rw.empty()) sa.random_weights = rw;
    return krylov::cli::cmd_solve(sa, std::cerr);
  }
  if (compare->parsed()) return krylov::cli::cmd_compare(ca, std::cout, std::cerr);
  if (locp->parsed()) return krylov::cli::cmd_locp(la, std::cout, std::cerr);
  if (gen->parsed()) return krylov::cli::cmd_gen(ga, std::cerr);
  return 1;
}
