#pragma once

// Extremal extensions of finitely supported data and the functional calculus
// of subordinate pairs.
//
// For a kernel delta in K_lambda, the span of the columns delta(., j) carries
// the inner product <x, y> = y* delta x. S and P are defined by their adjoints
// S* e_j = conj(s_j) e_j, P* e_j = conj(p_j) e_j, so in the column basis
// S = delta^{-1} diag(s) delta and P = delta^{-1} diag(p) delta, and a function
// known only through its node values w acts as f(S, P) = delta^{-1} diag(w) delta.

#include <optional>
#include <vector>

#include "gamma_pick/kernels.hpp"
#include "gamma_pick/pick.hpp"
#include "gamma_pick/realization.hpp"

namespace gamma_pick {

struct SubordinatePair {
  NodeSet nodes;
  KernelMatrix delta;
  ComplexMatrix S_matrix;
  ComplexMatrix P_matrix;
  double contraction_norm = 0.0;  // max over the audit grid of ||(2 alpha P - S)(2 - alpha S)^{-1}||
};

/// Builds (S, P) for delta and records the contraction norm over a boundary
/// alpha grid. Throws DomainError naming the worst failing constraint when
/// delta is not a strictly positive, unit-diagonal member of K_lambda.
SubordinatePair subordinate_pair(const KernelMatrix& delta, int alpha_grid = 128);

/// Norm of an operator given in the column basis: ||delta^{1/2} T delta^{-1/2}||.
double delta_norm(const KernelMatrix& delta, const ComplexMatrix& t);

/// max over alpha_grid boundary points of ||(2 alpha P - S)(2 - alpha S)^{-1}|| in the delta norm.
double gamma_contraction_norm(const SubordinatePair& pair, int alpha_grid = 128);

/// ||f(S, P)|| = sqrt(pencil_max((w w*) o delta, delta)).
double calculus_norm(const SubordinatePair& pair, const std::vector<cplx>& values);

/// Same norm from the whitened matrix delta^{-1/2} diag(w) delta^{1/2}.
double calculus_norm_whitened(const SubordinatePair& pair, const std::vector<cplx>& values);

struct VonNeumannAudit {
  int trials = 0;
  double max_ratio = 0.0;
  std::optional<KernelMatrix> worst_delta;
  std::optional<double> extremal_ratio;  // ratio at the dual-extremal kernel
  double max_contraction_norm = 0.0;
};

struct ExtensionResult {
  PickProblem problem;
  double rho = 0.0;
  double bracket_lo = 0.0;
  RealizedFunction interpolant;
  std::optional<DualCertificate> extremal_kernel;
  VonNeumannAudit audit;
};

/// rho from extremal_norm and an interpolant realized at the primal-certified
/// level rho, with the norm audit and a 100-trial von Neumann audit attached.
ExtensionResult extend(const NodeSet& nodes, const std::vector<cplx>& values, const SolverConfig& config = {});

/// calculus_norm / rho over `trials` random admissible kernels (and the
/// extremal kernel when present).
VonNeumannAudit von_neumann_audit(const ExtensionResult& result, int trials, std::uint64_t seed, unsigned threads = 1);

/// Same, from the raw ingredients.
VonNeumannAudit von_neumann_audit(const PickProblem& problem, double rho, const std::optional<KernelMatrix>& extremal,
                                  int trials, std::uint64_t seed, unsigned threads = 1);

/// Extremal norms of the prefixes of the data, n = 1, ..., size.
std::vector<double> nested_extremal_norms(const NodeSet& nodes, const std::vector<cplx>& values,
                                          const SolverConfig& config = {});

}  // namespace gamma_pick
