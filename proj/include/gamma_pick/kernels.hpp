#pragma once

// Kernels on G over finite node sets: the Szego kernel of G, the
// antisymmetric Hardy kernel of the bidisk, the test-function kernels
// B_alpha, and the admissibility test that carves out the cone K_lambda.

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gamma_pick/geometry.hpp"
#include "gamma_pick/linalg.hpp"

namespace gamma_pick {

/// Szego kernel of G:
/// 1 / ((1 - p1 conj(p2))^2 - (s1 - conj(s2) p1)(conj(s2) - s1 conj(p2))).
template <typename T>
std::complex<T> szego(std::complex<T> s1, std::complex<T> p1, std::complex<T> s2, std::complex<T> p2) {
  const std::complex<T> one(1);
  const std::complex<T> a = one - p1 * std::conj(p2);
  const std::complex<T> den = a * a - (s1 - std::conj(s2) * p1) * (std::conj(s2) - s1 * std::conj(p2));
  if (std::abs(den) < T(1e-300)) throw DomainError("szego: vanishing denominator");
  return one / den;
}

inline cplx szego(const GPoint& x, const GPoint& y) { return szego(x.s(), x.p(), y.s(), y.p()); }

/// Reproducing kernel of the antisymmetric Hardy space of the bidisk:
/// (z1 - z2) conj(w1 - w2) / (2 prod_{i,j} (1 - z_i conj(w_j))).
template <typename T>
std::complex<T> antisym_kernel(std::complex<T> z1, std::complex<T> z2, std::complex<T> w1, std::complex<T> w2) {
  const std::complex<T> one(1);
  const std::complex<T> den = T(2) * (one - z1 * std::conj(w1)) * (one - z1 * std::conj(w2)) *
                              (one - z2 * std::conj(w1)) * (one - z2 * std::conj(w2));
  return (z1 - z2) * std::conj(w1 - w2) / den;
}

/// B_alpha(x, y) = 1 / (1 - phi(alpha, x) conj(phi(alpha, y))).
inline cplx b_alpha(cplx alpha, const GPoint& x, const GPoint& y) {
  return 1.0 / (1.0 - phi(alpha, x) * std::conj(phi(alpha, y)));
}

/// Pairwise-distinct points of G (max-coordinate distance > 1e-9).
class NodeSet {
 public:
  explicit NodeSet(std::vector<GPoint> points);

  std::size_t size() const noexcept { return points_.size(); }
  const GPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<GPoint>& points() const noexcept { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// First `count` nodes.
  NodeSet prefix(std::size_t count) const;

  friend bool operator==(const NodeSet& a, const NodeSet& b) { return a.points_ == b.points_; }

 private:
  std::vector<GPoint> points_;
};

/// Hermitian matrix of kernel values k(i, j) over a node set.
struct KernelMatrix {
  NodeSet nodes;
  HermitianMatrix gram;

  KernelMatrix(NodeSet n, HermitianMatrix g);
};

/// Values phi(alpha, lambda_i).
ComplexVector phi_values(cplx alpha, const NodeSet& nodes);

/// C(alpha)(i, j) = 1 - phi_i(alpha) conj(phi_j(alpha)).
HermitianMatrix coordinate_matrix(cplx alpha, const NodeSet& nodes);

HermitianMatrix szego_gram(const NodeSet& nodes);
HermitianMatrix b_alpha_gram(cplx alpha, const NodeSet& nodes);

struct ConstraintMin {
  std::string label;
  double min_eig;
};

struct AdmissibilityReport {
  double min_eig_overall;              // min over boundary alpha of lambda_min(C(alpha) o k)
  cplx worst_alpha;                    // unit modulus
  std::vector<ConstraintMin> per_constraint;
  double diag_deviation;               // max |k(i,i) - 1|
  double gram_min_eig;                 // lambda_min(k)

  /// Worst residual over the phi-form and the auxiliary LMIs.
  double slack() const;
};

/// lambda_min(C(alpha) o k).
double alpha_min_eig(const KernelMatrix& k, cplx alpha);

/// Admissibility of k: lambda_min(C(alpha) o k) minimized over alpha_grid
/// boundary points and refined locally to refine_tol in arg(alpha); also the
/// auxiliary LMIs (4 - s_i conj(s_j)) o k, (1 - p_i conj(p_j)) o k and, as a
/// cross-check at the grid points, the (2 - alpha s) form.
AdmissibilityReport admissibility_report(const KernelMatrix& k, int alpha_grid = 256, double refine_tol = 1e-10,
                                         unsigned threads = 1);

/// k(i,j) / sqrt(k(i,i) k(j,j)). Throws DomainError naming a non-positive diagonal entry.
KernelMatrix normalize_diag(const KernelMatrix& k);

struct RandomAdmissibleOptions {
  double szego_weight = 0.05;  // eta: weight of the Szego gram that forces strict positivity
};

/// normalize_diag(sum_m (k_S o B_{alphas[m]} o v_m v_m*) + eta k_S).
KernelMatrix admissible_mixture(const NodeSet& nodes, const std::vector<cplx>& alphas,
                                const std::vector<ComplexVector>& vectors, double szego_weight);

/// Random member of K_lambda:
/// normalize_diag(sum_m (k_S o B_{alpha_m} o v_m v_m*) + eta k_S) with
/// boundary alpha_m and complex Gaussian v_m. Schur products of the
/// admissible Szego kernel with PSD matrices stay admissible.
KernelMatrix random_admissible(const NodeSet& nodes, std::uint64_t seed, int mix,
                               const RandomAdmissibleOptions& options = {});

}  // namespace gamma_pick
