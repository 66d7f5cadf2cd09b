#pragma once

// Primal-dual interior-point method for small block-diagonal semidefinite
// programs over complex Hermitian blocks:
//
//   (P)  min <C, X>   s.t.  <A_k, X> = b_k,  X = diag(X_1, ..., X_B) >= 0
//   (D)  max b^T y    s.t.  Z = C - sum_k y_k A_k >= 0
//
// with <U, V> = Re tr(U* V). Search direction HKM with a Mehrotra
// predictor-corrector. Constraint blocks are stored sparsely: the
// constraint counts here are small (n^2 for n nodes) while the number of
// blocks can run into the hundreds.

#include <complex>
#include <string>
#include <vector>

#include "gamma_pick/linalg.hpp"

namespace gamma_pick::sdp {

struct Entry {
  int row;
  int col;
  cplx value;
};

/// One linear constraint: per-block entry lists (Hermitian: both (i,j) and
/// (j,i) must be listed) and the right-hand side.
struct Constraint {
  std::vector<std::vector<Entry>> blocks;
  double rhs = 0.0;
};

struct Problem {
  std::vector<int> block_sizes;
  std::vector<ComplexMatrix> objective;  // one Hermitian matrix per block
  std::vector<Constraint> constraints;
};

struct Options {
  double tolerance = 1e-10;
  int max_iterations = 100;
  double step_fraction = 0.98;
};

enum class Status { Optimal, NearOptimal, IterationLimit, Stalled };

std::string to_string(Status status);

struct Solution {
  Status status = Status::Stalled;
  std::vector<ComplexMatrix> x;
  std::vector<ComplexMatrix> z;
  RealVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_infeasibility = 0.0;    // ||C - A*(y) - Z|| / (1 + ||C||)
  double relative_gap = 0.0;
  int iterations = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

}  // namespace gamma_pick::sdp
