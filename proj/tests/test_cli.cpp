#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "krylov/cli.hpp"

using namespace krylov;
using namespace krylov::cli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_matrix_spec") {
  REQUIRE(parse_matrix_spec("gen:diag:2,1").nrows == 2);
  REQUIRE(parse_matrix_spec("gen:laplacian2d:N=3").nrows == 9);
  REQUIRE(parse_matrix_spec("gen:convdiff:N=4").nrows == 16);
  REQUIRE_THROWS(parse_matrix_spec("gen:unknown:N=3"));
  REQUIRE_THROWS(parse_matrix_spec("/no/such/file.mtx"));
}

TEST_CASE("parse_rhs_spec") {
  REQUIRE(parse_rhs_spec("ones", 3) == DenseVector{1.0, 1.0, 1.0});
  DenseVector r1 = parse_rhs_spec("randn:5", 10);
  REQUIRE(r1 == randn_vector(10, 5));
  REQUIRE_THROWS(parse_rhs_spec("bogus", 3));
}

TEST_CASE("parse_method and names round trip") {
  for (const char* name :
       {"gmres", "wgmres", "wgmres-dct", "gmres-dr", "wgmres-dr", "wgmres-dr-dct"})
    REQUIRE(method_name(parse_method(name)) == name);
  REQUIRE_THROWS(parse_method("bicgstab"));
}

TEST_CASE("parse_p_list") {
  REQUIRE(parse_p_list("1..4") == std::vector<std::size_t>{1, 2, 3, 4});
  REQUIRE(parse_p_list("2,5,9") == std::vector<std::size_t>{2, 5, 9});
  REQUIRE(parse_p_list("7") == std::vector<std::size_t>{7});
}

TEST_CASE("history CSV rows equal matvecs and norms are relative") {
  SparseMatrix A = parse_matrix_spec("gen:diag:2,1");
  SolveConfig cfg;
  cfg.m = 1;
  SolveHistory h = run_solver(A, {1.0, 1.0}, {}, cfg);
  std::ostringstream out;
  write_history_csv(h, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "matvec,cycle,resid2,residW");
  std::size_t rows = 0;
  std::string first_data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (rows == 0) first_data = line;
    ++rows;
  }
  REQUIRE(rows == h.matvecs);
  // first row is matvec 1; its norms are scaled by the matvec-0 values
  REQUIRE(first_data.substr(0, 4) == "1,1,");
}

TEST_CASE("cmd_solve writes deterministic artifacts and exit codes") {
  std::string hist1 = "/tmp/krylov_test_hist1.csv";
  std::string hist2 = "/tmp/krylov_test_hist2.csv";
  std::string summ = "/tmp/krylov_test_summary.json";
  SolveArgs args;
  args.matrix = "gen:laplacian2d:N=6";
  args.rhs = "randn:3";
  args.method = "wgmres";
  args.m = 5;
  args.history_path = hist1;
  args.summary_path = summ;
  std::ostringstream err;
  REQUIRE(cmd_solve(args, err) == 0);
  args.history_path = hist2;
  REQUIRE(cmd_solve(args, err) == 0);
  REQUIRE(read_file(hist1) == read_file(hist2));

  auto j = nlohmann::json::parse(read_file(summ));
  REQUIRE(j["method"] == "wgmres");
  REQUIRE(j["m"] == 5);
  REQUIRE(j["converged"] == true);
  REQUIRE(j["final_rel_resid2"].get<double>() <= 1e-8);

  // CSV row count (+1 header) matches the summary matvec count
  std::istringstream in(read_file(hist1));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  REQUIRE(lines == j["matvecs"].get<std::size_t>() + 1);

  SECTION("budget exhaustion returns 2") {
    args.max_matvec = 3;
    args.history_path.clear();
    args.summary_path.clear();
    REQUIRE(cmd_solve(args, err) == 2);
  }
  SECTION("bad input returns 1") {
    args.matrix = "gen:nope";
    REQUIRE(cmd_solve(args, err) == 1);
    REQUIRE_FALSE(err.str().empty());
  }
  std::remove(hist1.c_str());
  std::remove(hist2.c_str());
  std::remove(summ.c_str());
}

TEST_CASE("cmd_compare aggregates over seeds") {
  CompareArgs args;
  args.matrix = "gen:diag:2,1";
  args.rhs = "ones";
  args.methods = {"gmres", "wgmres"};
  args.m_list = {1};
  args.seeds = {0, 1};
  std::ostringstream out, err;
  REQUIRE(cmd_compare(args, out, err) == 0);
  auto j = nlohmann::json::parse(out.str());
  REQUIRE(j["runs"].size() == 4);
  REQUIRE(j["aggregates"].size() == 2);
  REQUIRE(j["aggregates"][0]["median_matvecs"].get<double>() == 16.0);
  REQUIRE(j["aggregates"][1]["median_matvecs"].get<double>() == 7.0);

  SECTION("empty methods list is an error") {
    args.methods.clear();
    REQUIRE(cmd_compare(args, out, err) == 1);
  }
}

TEST_CASE("cmd_locp emits a two-column table") {
  LocpArgs args;
  args.eigvecs = "gen:laplacian2d:N=9:seed=1";
  args.p_list = "1..3";
  std::ostringstream out, err;
  REQUIRE(cmd_locp(args, out, err) == 0);
  std::istringstream in(out.str());
  std::size_t p;
  double v;
  std::size_t rows = 0;
  while (in >> p >> v) {
    REQUIRE(p == ++rows);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
  REQUIRE(rows == 3);

  SECTION("identity eigvecs from a file give loc = 1") {
    std::string path = "/tmp/krylov_test_eigvecs.txt";
    {
      std::ofstream f(path);
      f << "2 2\n1.0 1 0\n2.0 0 1\n";
    }
    LocpArgs fa;
    fa.eigvecs = path;
    fa.p_list = "1,2";
    std::ostringstream fout;
    REQUIRE(cmd_locp(fa, fout, err) == 0);
    std::istringstream fin(fout.str());
    while (fin >> p >> v) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(1.0, 1e-14));
    std::remove(path.c_str());
  }
  SECTION("unknown transform is an error") {
    args.transform = "fft";
    REQUIRE(cmd_locp(args, out, err) == 1);
  }
}

TEST_CASE("cmd_gen writes a round-trippable matrix") {
  GenArgs args;
  args.matrix = "gen:laplacian2d:N=2";
  args.out_path = "/tmp/krylov_test_gen.mtx";
  std::ostringstream err;
  REQUIRE(cmd_gen(args, err) == 0);
  SparseMatrix back = parse_matrix_spec(args.out_path);
  SparseMatrix orig = parse_matrix_spec(args.matrix);
  REQUIRE(back.row_starts == orig.row_starts);
  REQUIRE(back.col_indices == orig.col_indices);
  REQUIRE(back.values == orig.values);
  std::string text = read_file(args.out_path);
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("symmetric"));
  std::remove(args.out_path.c_str());
}
