#pragma once

// Transfer-function realization of an interpolant from a decomposition
// certificate. The blocks are factored (GNS), the isometry
//
//   V (1, Z(lambda_i) h_i) = (w_i / scale, h_i)
//
// is completed to a unitary on C^{1 + sum r_m}, and the interpolant is
// f(x) = A + B Z(x) (I - D Z(x))^{-1} C with Z(x) = blockdiag(phi(alpha_m, x) I_{r_m}).

#include <optional>
#include <vector>

#include "gamma_pick/geometry.hpp"
#include "gamma_pick/linalg.hpp"
#include "gamma_pick/pick.hpp"

namespace gamma_pick {

struct GnsVectors {
  std::vector<ComplexMatrix> block_columns;  // L_m (n x r_m), Gamma_m ~ L_m L_m*
  std::vector<ComplexVector> embeddings;     // h_i, the rows of [L_1 ... L_M]
};

/// Factors each block after dropping eigenvalues below rank_tol times the
/// largest eigenvalue over all blocks. <h_i, h_j> = sum_m Gamma_m(i, j).
GnsVectors gns_vectors(const DecompositionCertificate& cert, double rank_tol = 1e-10);

struct Colligation {
  std::vector<cplx> alphas;
  std::vector<int> block_dims;
  cplx A = 0.0;
  ComplexMatrix B;  // 1 x R
  ComplexMatrix C;  // R x 1
  ComplexMatrix D;  // R x R
  double scale = 1.0;
  double isometry_defect = 0.0;    // ||V*V - I||
  double coisometry_defect = 0.0;  // ||VV* - I||
  double map_residual = 0.0;       // max_i ||V u_i - v_i||
  double kernel_identity_error = 0.0;

  int state_dim() const { return static_cast<int>(D.rows()); }
  ComplexMatrix unitary() const;
};

/// Builds the colligation for the normalized data w / cert.scale.
/// Throws MismatchError when the Gram identity fails beyond 1e-6.
Colligation build_colligation(const PickProblem& problem, const DecompositionCertificate& cert);

struct NormAudit {
  int samples = 0;
  double observed_sup = 0.0;
};

struct RealizedFunction {
  Colligation colligation;
  std::optional<NormAudit> norm_audit;
};

/// Unit-ball value A + B Z (I - D Z)^{-1} C. Throws DomainError when the
/// resolvent reciprocal condition number is below 1e-12.
cplx evaluate(const RealizedFunction& fn, const GPoint& x);

/// scale * evaluate: the interpolant of the original data.
cplx evaluate_scaled(const RealizedFunction& fn, const GPoint& x);

/// max |evaluate| over sample_g(samples, seed).
double norm_audit(const RealizedFunction& fn, std::size_t samples, std::uint64_t seed, unsigned threads = 1);

/// max_{i,j} |1 - w_i conj(w_j) / t^2 - sum_m E_m(i,j) Gamma_m(i,j) / t^2| with t = cert.scale.
double kernel_identity_error(const PickProblem& problem, const DecompositionCertificate& cert);

/// Realization with the 10^4-sample audit attached.
RealizedFunction realize(const PickProblem& problem, const DecompositionCertificate& cert,
                         std::size_t audit_samples = 10000, std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace gamma_pick
