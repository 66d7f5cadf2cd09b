#pragma once

// Independent re-verification of certificates. Uses only linear algebra and
// kernel evaluations, never the solver.

#include "gamma_pick/pick.hpp"

namespace gamma_pick {

struct PrimalCheck {
  double residual = 0.0;       // ||sum_m E_m o Gamma_m - (scale^2 - w w*)||_F
  double min_block_eig = 0.0;  // min_m lambda_min(Gamma_m)
  bool unit_alphas = true;

  bool ok(double residual_tol, double psd_tol) const {
    return unit_alphas && residual <= residual_tol && min_block_eig >= -psd_tol;
  }
};

PrimalCheck verify_primal(const PickProblem& problem, const DecompositionCertificate& cert);

struct DualCheck {
  double violation = 0.0;            // -lambda_min of the Pick matrix at the certificate scale
  double admissibility_slack = 0.0;  // AdmissibilityReport::slack()
  double gram_min_eig = 0.0;
  double diag_deviation = 0.0;

  bool ok(double dual_tol, double slack_tol, double strict_tol) const {
    return violation >= dual_tol && admissibility_slack >= -slack_tol && gram_min_eig >= strict_tol &&
           diag_deviation <= 1e-12;
  }
};

DualCheck verify_dual(const PickProblem& problem, const DualCertificate& cert, int alpha_grid = 256,
                      double refine_tol = 1e-10);

}  // namespace gamma_pick
