#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gamma_pick/io.hpp"
#include "gamma_pick/verify.hpp"

using namespace gamma_pick;
using namespace gamma_pick::io;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gamma_pick_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

PickProblem sample_problem() {
  return PickProblem(NodeSet({GPoint::make(0.0, 0.0), GPoint::make(0.6, 0.09), GPoint::make(cplx(0.1, -0.4), 0.03)}),
                     {0.0, cplx(0.3, 0.1), cplx(-0.2, 0.25)});
}

}  // namespace

TEST_CASE("numbers carry 17 significant digits") {
  CHECK(dump(Json(0.1)) == "0.10000000000000001\n");
  CHECK(dump(Json(1.0 / 3.0)) == "0.33333333333333331\n");
  CHECK(dump(Json(2.0)) == "2\n");
  CHECK(dump(Json::array({1.5, -0.25})) == "[1.5, -0.25]\n");
  CHECK_THROWS_AS(dump(Json(std::nan(""))), FormatError);
  const double x = 0.7234987234987123;
  CHECK(Json::parse(dump(Json(x))).get<double>() == x);
}

TEST_CASE("problem round trip") {
  const PickProblem p = sample_problem();
  const PickProblem q = problem_from_json(Json::parse(dump(to_json(p))));
  CHECK(q.nodes == p.nodes);
  CHECK(q.targets == p.targets);
  CHECK_THROWS_AS(problem_from_json(Json::parse(R"({"nodes": [[0,0,0,0]]})")), FormatError);
  CHECK_THROWS_AS(problem_from_json(Json::parse(R"({"nodes": [[0,0,0,0]], "targets": [[0,0],[1,0]]})")),
                  FormatError);
  CHECK_THROWS_AS(problem_from_json(Json::parse(R"({"nodes": [[2,0,1,0]], "targets": [[0,0]]})")), DomainError);
}

TEST_CASE("certificate round trips re-verify") {
  const PickProblem p = sample_problem();
  const FeasibilityVerdict feasible = solve_feasibility(p, 4.0);
  REQUIRE(feasible.primal);
  const DecompositionCertificate back = primal_from_json(Json::parse(dump(to_json(*feasible.primal))));
  CHECK(back.scale == feasible.primal->scale);
  CHECK(back.alphas == feasible.primal->alphas);
  CHECK(verify_primal(p, back).residual == verify_primal(p, *feasible.primal).residual);
  CHECK_THROWS_AS(dual_from_json(to_json(*feasible.primal)), FormatError);

  const FeasibilityVerdict infeasible = solve_feasibility(p, 1.0);
  REQUIRE(infeasible.dual);
  const DualCertificate dual = dual_from_json(Json::parse(dump(to_json(*infeasible.dual))));
  CHECK(dual.violation == infeasible.dual->violation);
  CHECK((dual.kernel.gram.matrix() - infeasible.dual->kernel.gram.matrix()).norm() == 0.0);
  CHECK(verify_dual(p, dual).ok(1e-6, 1e-8, 1e-10));
}

TEST_CASE("colligation round trip") {
  const PickProblem p = sample_problem();
  const FeasibilityVerdict v = solve_feasibility(p, 4.0);
  REQUIRE(v.primal);
  const RealizedFunction f = realize(p, *v.primal, 100);
  const Colligation c = colligation_from_json(Json::parse(dump(to_json(f.colligation))));
  CHECK(c.block_dims == f.colligation.block_dims);
  CHECK((c.unitary() - f.colligation.unitary()).norm() == 0.0);
  const RealizedFunction g{c, std::nullopt};
  for (const GPoint& x : sample_g(10, 5)) CHECK(evaluate_scaled(g, x) == evaluate_scaled(f, x));

  Json broken = to_json(f.colligation);
  broken["block_dims"] = Json::array({99});
  CHECK_THROWS_AS(colligation_from_json(broken), FormatError);
}

TEST_CASE("atomic writes and the CSV grid") {
  const auto path = scratch("a.json");
  write_json(path, Json{{"x", 1.25}});
  CHECK(read_text(path) == "{\n  \"x\": 1.25\n}\n");
  CHECK(read_json(path)["x"] == 1.25);
  CHECK_THROWS_AS(read_json(scratch("missing.json")), FormatError);

  Colligation c;
  c.A = 0.4;
  c.B = ComplexMatrix(1, 0);
  c.C = ComplexMatrix(0, 1);
  c.D = ComplexMatrix(0, 0);
  c.scale = 2.0;
  const auto csv = scratch("grid.csv");
  const GridDump d = write_grid_csv(csv, RealizedFunction{c, std::nullopt}, 10);
  CHECK(d.rows == 55);
  CHECK(d.observed_sup == doctest::Approx(0.8));
  CHECK(d.observed_sup_unit == doctest::Approx(0.4));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "s_re,s_im,p_re,p_im,f_re,f_im,abs_f");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 55);
}

TEST_CASE("disk lattice stays inside the disk") {
  const auto z = disk_lattice(200);
  CHECK(z.size() == 200);
  for (const cplx& v : z) CHECK(std::abs(v) < 1.0);
}
