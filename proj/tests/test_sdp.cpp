#include <doctest.h>

#include <random>

#include "gamma_pick/sdp.hpp"

using namespace gamma_pick;
using namespace gamma_pick::sdp;

TEST_CASE("min <C, X> over unit-trace X is lambda_min(C)") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int n : {1, 2, 4, 6}) {
    ComplexMatrix c(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) = cplx(g(rng), g(rng));
    }
    c = (c + c.adjoint()).eval();
    Problem p;
    p.block_sizes = {n};
    p.objective = {c};
    Constraint trace;
    trace.blocks.resize(1);
    for (int i = 0; i < n; ++i) trace.blocks[0].push_back({i, i, 1.0});
    trace.rhs = 1.0;
    p.constraints.push_back(trace);
    const Solution s = solve(p);
    CHECK((s.status == Status::Optimal || s.status == Status::NearOptimal));
    const double expected = lambda_min(HermitianMatrix(c));
    CHECK(s.primal_objective == doctest::Approx(expected).epsilon(1e-8));
    CHECK(s.dual_objective == doctest::Approx(expected).epsilon(1e-8));
    CHECK(std::abs(s.y(0) - expected) <= 1e-7 * (1 + std::abs(expected)));
    CHECK(lambda_min(HermitianMatrix(s.x[0])) >= -1e-10);
  }
}

TEST_CASE("a linear program as 1x1 blocks") {
  // x1 + x2 + x3 = 1, x1 - x3 = 0.2: x1 = 0.2 + x3, x2 = 0.8 - 2 x3,
  // cost 1.8 + 0.1 x3, so the optimum is x3 = 0.
  Problem p;
  p.block_sizes = {1, 1, 1};
  p.objective = {ComplexMatrix::Constant(1, 1, 1.0), ComplexMatrix::Constant(1, 1, 2.0),
                 ComplexMatrix::Constant(1, 1, 3.1)};
  Constraint sum;
  sum.blocks = {{{0, 0, 1.0}}, {{0, 0, 1.0}}, {{0, 0, 1.0}}};
  sum.rhs = 1.0;
  Constraint diff;
  diff.blocks = {{{0, 0, 1.0}}, {}, {{0, 0, -1.0}}};
  diff.rhs = 0.2;
  p.constraints = {sum, diff};
  const Solution s = solve(p);
  CHECK(s.primal_objective == doctest::Approx(1.8).epsilon(1e-8));
  CHECK(s.x[0](0, 0).real() == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(s.x[1](0, 0).real() == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(std::abs(s.x[2](0, 0)) <= 1e-7);
}

TEST_CASE("complex constraints and complementary slackness") {
  // min <C, X> s.t. X(0,0) = 1, X(1,1) = 1 over 2x2 complex X: the answer is
  // C00 + C11 - 2 |C01| by choosing the phase of X01.
  const cplx off(0.3, -0.4);
  ComplexMatrix c(2, 2);
  c << 1.0, off, std::conj(off), 2.0;
  Problem p;
  p.block_sizes = {2};
  p.objective = {c};
  Constraint a, b;
  a.blocks = {{{0, 0, 1.0}}};
  a.rhs = 1.0;
  b.blocks = {{{1, 1, 1.0}}};
  b.rhs = 1.0;
  p.constraints = {a, b};
  const Solution s = solve(p);
  CHECK(s.primal_objective == doctest::Approx(3.0 - 2.0 * std::abs(off)).epsilon(1e-8));
  CHECK(std::abs((s.x[0] * s.z[0]).trace()) <= 1e-7);
  CHECK(s.primal_infeasibility <= 1e-9);
  CHECK(s.dual_infeasibility <= 1e-9);
}

TEST_CASE("status strings") {
  CHECK(to_string(Status::Optimal) == "optimal");
  CHECK_FALSE(to_string(Status::Stalled).empty());
}
