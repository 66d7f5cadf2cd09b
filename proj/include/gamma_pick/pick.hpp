#pragma once

// Nevanlinna-Pick interpolation on G with certificates.
//
// A problem (lambda_i, w_i) is solvable at norm level t exactly when the
// matrix (t^2 - w_i conj(w_j)) lies in the wedge generated by the test
// functions phi(alpha, .):
//
//   t^2 - w_i conj(w_j) = sum_m (1 - phi_i(alpha_m) conj(phi_j(alpha_m))) Gamma_m(i, j),
//
// Gamma_m PSD, with a finitely supported measure on the unit circle. Failure
// is witnessed by a kernel k in K_lambda with (t^2 - w_i conj(w_j)) o k not PSD.
// Both sides come out of one semidefinite program: the gauge
//
//   tau* = min { tau : tau J - w w* = sum_m E_m o Gamma_m, Gamma_m >= 0 },
//
// whose value is the squared extremal norm on the alpha support and whose
// multiplier is the extremal kernel.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "gamma_pick/kernels.hpp"
#include "gamma_pick/linalg.hpp"

namespace gamma_pick {

struct PickProblem {
  NodeSet nodes;
  std::vector<cplx> targets;

  PickProblem(NodeSet n, std::vector<cplx> w);

  std::size_t size() const noexcept { return targets.size(); }
  double max_abs_target() const;
  ComplexVector target_vector() const;
};

struct SolverConfig {
  int alpha_grid = 64;           // M, equispaced measure support on the unit circle
  double primal_tol = 1e-8;      // certificate residual
  double dual_tol = 1e-6;        // minimum verified violation
  double rho_tol = 1e-4;         // relative bisection width
  double ipm_tol = 1e-10;
  int ipm_max_iterations = 120;
  int dual_iterations = 300;     // projected-ascent steps per start
  int dual_grid = 64;            // alpha grid for the ascent penalty
  int verify_grid = 256;         // alpha grid for certificate verification
  double refine_tol = 1e-10;
  double strict_tol = 1e-10;     // lambda_min(k) needed for strict membership in K_lambda
  double admissibility_tol = 1e-8;
  double block_psd_tol = 1e-9;
  int exchange_rounds = 8;       // worst-alpha insertions before the 4M refinement
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Finite form of a decomposition 1 - f conj(f) = Delta(1 - phi conj(phi)) at the nodes,
/// at norm level `scale`.
struct DecompositionCertificate {
  std::vector<cplx> alphas;              // unit circle
  std::vector<HermitianMatrix> blocks;   // Gamma_m, PSD
  double residual = 0.0;                 // Frobenius gap to (scale^2 - w_i conj(w_j))
  double scale = 0.0;
};

/// A kernel in K_lambda whose Pick matrix at `scale` is not PSD.
struct DualCertificate {
  KernelMatrix kernel;
  double violation = 0.0;            // -lambda_min(pick_matrix(problem, kernel, scale))
  ComplexVector witness;             // eigenvector for that eigenvalue
  double admissibility_slack = 0.0;  // worst constraint residual of the kernel
  double scale = 0.0;
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<DecompositionCertificate> primal;
  std::optional<DualCertificate> dual;
  int iterations = 0;
  std::chrono::duration<double> wall_time{0};
  /// Decided inside the tie zone: the primal certificate is at a level within
  /// rho_tol above the requested scale.
  bool tie_warning = false;
};

/// (scale^2 - w_i conj(w_j)) k(i, j).
HermitianMatrix pick_matrix(const PickProblem& problem, const KernelMatrix& k, double scale);

/// E_m(i, j) = 1 - phi_i(alpha) conj(phi_j(alpha)) applied blockwise: sum_m E_m o Gamma_m.
HermitianMatrix decomposition_sum(const NodeSet& nodes, const std::vector<cplx>& alphas,
                                  const std::vector<HermitianMatrix>& blocks);

/// Equivalent certificate with total block rank at most n^2: moves along
/// directions Gamma_m -> L_m (I + s X_m) L_m* that keep sum_m E_m o Gamma_m
/// fixed until a block loses rank, dropping empty blocks.
DecompositionCertificate compress_certificate(const PickProblem& problem, const DecompositionCertificate& cert,
                                              double rank_tol = 1e-12);

/// Decides solvability at level `scale` with a primal or dual certificate.
/// Throws UndecidedError when neither can be produced after refinement.
FeasibilityVerdict solve_feasibility(const PickProblem& problem, double scale, const SolverConfig& config = {});

/// Projected ascent of -lambda_min(pick_matrix(., k, scale)) over unit-diagonal
/// PSD kernels with the boundary Schur LMIs enforced by a growing quadratic
/// penalty. Returns a certificate only after independent verification.
std::optional<DualCertificate> dual_search(const PickProblem& problem, double scale, const SolverConfig& config,
                                           std::uint64_t seed);

/// Same, starting from `warm_start` in addition to the default starts.
std::optional<DualCertificate> dual_search(const PickProblem& problem, double scale, const SolverConfig& config,
                                           std::uint64_t seed, const std::optional<KernelMatrix>& warm_start);

struct ExtremalNormResult {
  double rho = 0.0;            // upper end of the final bracket (primal certified)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  DecompositionCertificate certificate_at_rho;       // at rho itself
  DecompositionCertificate certificate_at_rho_plus;  // at rho (1 + 10 rho_tol)
  std::optional<DualCertificate> extremal_kernel;    // at rho (1 - 10 rho_tol)
  std::optional<DualCertificate> certificate_at_lo;  // at bracket_lo, unless lo is the trivial max |w_i|
  int probes = 0;
  bool tie_warning = false;
};

/// Extremal norm by bisection on solve_feasibility.
ExtremalNormResult extremal_norm(const PickProblem& problem, const SolverConfig& config = {});

/// Repeated feasibility decisions on one problem sharing the alpha support
/// (including exchange points) and the gauge solution between calls.
class FeasibilitySolver {
 public:
  FeasibilitySolver(const PickProblem& problem, const SolverConfig& config);
  ~FeasibilitySolver();
  FeasibilitySolver(FeasibilitySolver&&) noexcept;
  FeasibilitySolver& operator=(FeasibilitySolver&&) noexcept;

  FeasibilityVerdict decide(double scale);

  /// Squared extremal norm on the current support (solves the gauge if needed).
  double gauge_value();
  const std::vector<cplx>& support() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace gamma_pick
