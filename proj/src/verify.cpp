#include "gamma_pick/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gamma_pick {

PrimalCheck verify_primal(const PickProblem& problem, const DecompositionCertificate& cert) {
  const Eigen::Index n = problem.size();
  if (cert.alphas.size() != cert.blocks.size()) throw MismatchError("verify_primal: alphas/blocks length mismatch");
  PrimalCheck check;
  check.min_block_eig = std::numeric_limits<double>::infinity();
  const ComplexVector w = problem.target_vector();
  ComplexMatrix gap = cert.scale * cert.scale * ComplexMatrix::Ones(n, n) - w * w.adjoint();
  for (std::size_t m = 0; m < cert.blocks.size(); ++m) {
    if (cert.blocks[m].dim() != n) throw MismatchError("verify_primal: block dimension differs from node count");
    if (std::abs(std::abs(cert.alphas[m]) - 1.0) > 1e-12) check.unit_alphas = false;
    gap -= coordinate_matrix(cert.alphas[m], problem.nodes).matrix().cwiseProduct(cert.blocks[m].matrix());
    check.min_block_eig = std::min(check.min_block_eig, lambda_min(cert.blocks[m]));
  }
  if (cert.blocks.empty()) check.min_block_eig = 0.0;
  check.residual = gap.norm();
  return check;
}

DualCheck verify_dual(const PickProblem& problem, const DualCertificate& cert, int alpha_grid, double refine_tol) {
  if (!(cert.kernel.nodes == problem.nodes)) throw MismatchError("verify_dual: kernel nodes differ from the problem");
  DualCheck check;
  const ComplexVector w = problem.target_vector();
  const Eigen::Index n = w.size();
  const double t2 = cert.scale * cert.scale;
  const HermitianMatrix pick(
      (t2 * ComplexMatrix::Ones(n, n) - w * w.adjoint()).cwiseProduct(cert.kernel.gram.matrix()));
  check.violation = -lambda_min(pick);
  const AdmissibilityReport report = admissibility_report(cert.kernel, alpha_grid, refine_tol);
  check.admissibility_slack = report.slack();
  check.gram_min_eig = report.gram_min_eig;
  check.diag_deviation = report.diag_deviation;
  return check;
}

}  // namespace gamma_pick
