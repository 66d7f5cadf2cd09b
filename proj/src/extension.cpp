#include "gamma_pick/extension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/parallel.hpp"

namespace gamma_pick {

namespace {

ComplexVector as_vector(const std::vector<cplx>& values) {
  ComplexVector w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w(i) = values[i];
  return w;
}

ComplexMatrix similarity(const KernelMatrix& delta, const ComplexVector& diag) {
  const ComplexMatrix& d = delta.gram.matrix();
  return d.ldlt().solve(diag.asDiagonal() * d);
}

}  // namespace

SubordinatePair subordinate_pair(const KernelMatrix& delta, int alpha_grid) {
  const AdmissibilityReport report = admissibility_report(delta, 256);
  if (report.gram_min_eig < 1e-10) {
    throw DomainError("subordinate_pair: kernel is not strictly positive (lambda_min = " +
                      std::to_string(report.gram_min_eig) + ")");
  }
  if (report.diag_deviation > 1e-12) throw DomainError("subordinate_pair: kernel diagonal is not 1");
  std::string worst = "phi_form";
  double worst_value = report.min_eig_overall;
  for (const auto& c : report.per_constraint) {
    if (c.label != "mobius_form" && c.min_eig < worst_value) {
      worst = c.label;
      worst_value = c.min_eig;
    }
  }
  if (worst_value < -1e-8) {
    throw DomainError("subordinate_pair: kernel fails " + worst + " (min eigenvalue " + std::to_string(worst_value) +
                      ")");
  }
  const Eigen::Index n = delta.nodes.size();
  ComplexVector s(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = delta.nodes[i].s();
    p(i) = delta.nodes[i].p();
  }
  SubordinatePair pair{delta.nodes, delta, similarity(delta, s), similarity(delta, p), 0.0};
  pair.contraction_norm = gamma_contraction_norm(pair, alpha_grid);
  return pair;
}

double delta_norm(const KernelMatrix& delta, const ComplexMatrix& t) {
  const ComplexMatrix root = psd_sqrt(delta.gram);
  const ComplexMatrix inv_root = root.inverse();
  return spectral_norm(ComplexMatrix(root * t * inv_root));
}

double gamma_contraction_norm(const SubordinatePair& pair, int alpha_grid) {
  const Eigen::Index n = pair.S_matrix.rows();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const ComplexMatrix root = psd_sqrt(pair.delta.gram);
  const ComplexMatrix inv_root = root.inverse();
  double worst = 0.0;
  for (int m = 0; m < alpha_grid; ++m) {
    const cplx alpha = std::polar(1.0, 2.0 * M_PI * m / alpha_grid);
    const ComplexMatrix num = 2.0 * alpha * pair.P_matrix - pair.S_matrix;
    const ComplexMatrix den = 2.0 * eye - alpha * pair.S_matrix;
    const ComplexMatrix t = den.transpose().partialPivLu().solve(num.transpose()).transpose();
    worst = std::max(worst, spectral_norm(ComplexMatrix(root * t * inv_root)));
  }
  return worst;
}

double calculus_norm(const SubordinatePair& pair, const std::vector<cplx>& values) {
  if (values.size() != pair.nodes.size()) throw MismatchError("calculus_norm: value count does not match the nodes");
  const ComplexVector w = as_vector(values);
  const HermitianMatrix a((w * w.adjoint()).cwiseProduct(pair.delta.gram.matrix()));
  return std::sqrt(std::max(0.0, pencil_max(a, pair.delta.gram)));
}

double calculus_norm_whitened(const SubordinatePair& pair, const std::vector<cplx>& values) {
  if (values.size() != pair.nodes.size()) throw MismatchError("calculus_norm: value count does not match the nodes");
  return delta_norm(pair.delta, similarity(pair.delta, as_vector(values)));
}

VonNeumannAudit von_neumann_audit(const PickProblem& problem, double rho, const std::optional<KernelMatrix>& extremal,
                                  int trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw DomainError("von_neumann_audit: trials must be at least 1");
  const int mix = static_cast<int>(std::max<std::size_t>(2, problem.size()));
  std::vector<double> ratios(trials), contraction(trials);
  std::vector<std::optional<KernelMatrix>> kernels(trials);
  auto ratio_of = [&](double norm) { return rho > 0.0 ? norm / rho : 0.0; };
  detail::parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    const std::uint64_t trial_seed = seed * 0x9E3779B97F4A7C15ULL + k + 1;
    const KernelMatrix delta = random_admissible(problem.nodes, trial_seed, mix);
    const SubordinatePair pair = subordinate_pair(delta);
    ratios[k] = ratio_of(calculus_norm(pair, problem.targets));
    contraction[k] = pair.contraction_norm;
    kernels[k] = delta;
  });
  VonNeumannAudit audit;
  audit.trials = trials;
  for (int k = 0; k < trials; ++k) {
    audit.max_contraction_norm = std::max(audit.max_contraction_norm, contraction[k]);
    if (!audit.worst_delta || ratios[k] > audit.max_ratio) {
      audit.max_ratio = ratios[k];
      audit.worst_delta = kernels[k];
    }
  }
  if (extremal) {
    const SubordinatePair pair = subordinate_pair(*extremal);
    audit.extremal_ratio = ratio_of(calculus_norm(pair, problem.targets));
    audit.max_contraction_norm = std::max(audit.max_contraction_norm, pair.contraction_norm);
  }
  return audit;
}

VonNeumannAudit von_neumann_audit(const ExtensionResult& result, int trials, std::uint64_t seed, unsigned threads) {
  std::optional<KernelMatrix> extremal;
  if (result.extremal_kernel) extremal = result.extremal_kernel->kernel;
  return von_neumann_audit(result.problem, result.rho, extremal, trials, seed, threads);
}

ExtensionResult extend(const NodeSet& nodes, const std::vector<cplx>& values, const SolverConfig& config) {
  PickProblem problem(nodes, values);
  ExtremalNormResult norm = extremal_norm(problem, config);
  RealizedFunction g = realize(problem, norm.certificate_at_rho, 10000, config.seed, config.threads);
  ExtensionResult result{std::move(problem), norm.rho, norm.bracket_lo, std::move(g), std::move(norm.extremal_kernel),
                         {}};
  result.audit = von_neumann_audit(result, 100, config.seed, config.threads);
  return result;
}

std::vector<double> nested_extremal_norms(const NodeSet& nodes, const std::vector<cplx>& values,
                                          const SolverConfig& config) {
  if (values.size() != nodes.size()) throw MismatchError("nested_extremal_norms: value count does not match the nodes");
  std::vector<double> out;
  for (std::size_t n = 1; n <= nodes.size(); ++n) {
    const PickProblem prefix(nodes.prefix(n), std::vector<cplx>(values.begin(), values.begin() + n));
    out.push_back(extremal_norm(prefix, config).rho);
  }
  return out;
}

}  // namespace gamma_pick
