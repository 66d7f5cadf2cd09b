#include "gamma_pick/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gamma_pick/parallel.hpp"

namespace gamma_pick {
namespace {

constexpr double kDistinctTol = 1e-9;
constexpr double kInvPhi = 0.6180339887498949;

double node_distance(const GPoint& a, const GPoint& b) {
  return std::max(std::abs(a.s() - b.s()), std::abs(a.p() - b.p()));
}

template <typename F>
double golden_min(F&& f, double lo, double hi, double tol, double* value) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  *value = std::min(fc, fd);
  return fc < fd ? c : d;
}

}  // namespace

NodeSet::NodeSet(std::vector<GPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("NodeSet: at least one node is required");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      if (node_distance(points_[i], points_[j]) <= kDistinctTol) {
        throw DomainError("NodeSet: nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

NodeSet NodeSet::prefix(std::size_t count) const {
  return NodeSet(std::vector<GPoint>(points_.begin(), points_.begin() + std::min(count, points_.size())));
}

KernelMatrix::KernelMatrix(NodeSet n, HermitianMatrix g) : nodes(std::move(n)), gram(std::move(g)) {
  if (static_cast<std::size_t>(gram.dim()) != nodes.size()) {
    throw MismatchError("KernelMatrix: gram is " + std::to_string(gram.dim()) + "x" + std::to_string(gram.dim()) +
                        " but there are " + std::to_string(nodes.size()) + " nodes");
  }
}

ComplexVector phi_values(cplx alpha, const NodeSet& nodes) {
  ComplexVector v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v(i) = phi(alpha, nodes[i]);
  return v;
}

HermitianMatrix coordinate_matrix(cplx alpha, const NodeSet& nodes) {
  const ComplexVector v = phi_values(alpha, nodes);
  const Eigen::Index n = v.size();
  return HermitianMatrix(ComplexMatrix::Ones(n, n) - v * v.adjoint());
}

HermitianMatrix szego_gram(const NodeSet& nodes) {
  const Eigen::Index n = nodes.size();
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = szego(nodes[i], nodes[j]);
  }
  return HermitianMatrix(g);
}

HermitianMatrix b_alpha_gram(cplx alpha, const NodeSet& nodes) {
  const ComplexVector v = phi_values(alpha, nodes);
  const Eigen::Index n = v.size();
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = 1.0 / (1.0 - v(i) * std::conj(v(j)));
  }
  return HermitianMatrix(g);
}

double AdmissibilityReport::slack() const {
  double worst = min_eig_overall;
  for (const auto& c : per_constraint) {
    if (c.label != "mobius_form") worst = std::min(worst, c.min_eig);
  }
  return worst;
}

double alpha_min_eig(const KernelMatrix& k, cplx alpha) {
  return lambda_min(schur(coordinate_matrix(alpha, k.nodes), k.gram));
}

AdmissibilityReport admissibility_report(const KernelMatrix& k, int alpha_grid, double refine_tol,
                                         unsigned threads) {
  if (alpha_grid < 8) throw DomainError("admissibility_report: alpha_grid must be at least 8");
  const NodeSet& nodes = k.nodes;
  const Eigen::Index n = nodes.size();
  const double step = 2.0 * M_PI / alpha_grid;

  std::vector<double> grid_min(alpha_grid);
  std::vector<double> mobius_min(alpha_grid);
  detail::parallel_for(alpha_grid, threads, [&](std::size_t g) {
    const cplx alpha = std::polar(1.0, g * step);
    grid_min[g] = alpha_min_eig(k, alpha);
    ComplexVector d(n), q(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i) = 2.0 - alpha * nodes[i].s();
      q(i) = 2.0 * alpha * nodes[i].p() - nodes[i].s();
    }
    const HermitianMatrix mob(d * d.adjoint() - q * q.adjoint());
    mobius_min[g] = lambda_min(schur(mob, k.gram));
  });

  // Refine around the lowest local minima of the grid profile.
  std::vector<int> candidates;
  for (int g = 0; g < alpha_grid; ++g) {
    const double left = grid_min[(g + alpha_grid - 1) % alpha_grid];
    const double right = grid_min[(g + 1) % alpha_grid];
    if (grid_min[g] <= left && grid_min[g] <= right) candidates.push_back(g);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](int a, int b) { return grid_min[a] < grid_min[b] || (grid_min[a] == grid_min[b] && a < b); });
  if (candidates.size() > 3) candidates.resize(3);

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int g = 0; g < alpha_grid; ++g) {
    if (grid_min[g] < best) {
      best = grid_min[g];
      best_theta = g * step;
    }
  }
  auto profile = [&](double theta) { return alpha_min_eig(k, std::polar(1.0, theta)); };
  for (int g : candidates) {
    double value = 0.0;
    const double theta = golden_min(profile, (g - 1) * step, (g + 1) * step, std::max(refine_tol, 1e-15), &value);
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  }

  AdmissibilityReport report;
  report.min_eig_overall = best;
  report.worst_alpha = std::polar(1.0, best_theta);

  ComplexMatrix aux_s(n, n), aux_p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      aux_s(i, j) = 4.0 - nodes[i].s() * std::conj(nodes[j].s());
      aux_p(i, j) = 1.0 - nodes[i].p() * std::conj(nodes[j].p());
    }
  }
  report.per_constraint.push_back({"four_minus_s", lambda_min(schur(HermitianMatrix(aux_s), k.gram))});
  report.per_constraint.push_back({"one_minus_p", lambda_min(schur(HermitianMatrix(aux_p), k.gram))});
  report.per_constraint.push_back({"mobius_form", *std::min_element(mobius_min.begin(), mobius_min.end())});

  double dev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) dev = std::max(dev, std::abs(k.gram(i, i) - 1.0));
  report.diag_deviation = dev;
  report.gram_min_eig = lambda_min(k.gram);
  return report;
}

KernelMatrix normalize_diag(const KernelMatrix& k) {
  const Eigen::Index n = k.gram.dim();
  RealVector inv_root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = k.gram(i, i).real();
    if (!(d > 0.0)) {
      throw DomainError("normalize_diag: diagonal entry " + std::to_string(i) + " is not positive (" +
                        std::to_string(d) + ")");
    }
    inv_root(i) = 1.0 / std::sqrt(d);
  }
  ComplexMatrix g = inv_root.asDiagonal() * k.gram.matrix() * inv_root.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) g(i, i) = 1.0;
  return KernelMatrix(k.nodes, HermitianMatrix(g));
}

KernelMatrix admissible_mixture(const NodeSet& nodes, const std::vector<cplx>& alphas,
                                const std::vector<ComplexVector>& vectors, double szego_weight) {
  if (alphas.size() != vectors.size()) throw MismatchError("admissible_mixture: alphas/vectors length mismatch");
  const Eigen::Index n = nodes.size();
  const ComplexMatrix ks = szego_gram(nodes).matrix();
  ComplexMatrix acc = szego_weight * ks;
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    if (vectors[m].size() != n) throw MismatchError("admissible_mixture: vector length mismatch");
    const ComplexMatrix rank_one = vectors[m] * vectors[m].adjoint();
    acc += ks.cwiseProduct(b_alpha_gram(alphas[m], nodes).matrix()).cwiseProduct(rank_one);
  }
  return normalize_diag(KernelMatrix(nodes, HermitianMatrix(acc)));
}

KernelMatrix random_admissible(const NodeSet& nodes, std::uint64_t seed, int mix,
                               const RandomAdmissibleOptions& options) {
  if (mix < 1) throw DomainError("random_admissible: mix must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = nodes.size();
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<cplx> alphas;
    std::vector<ComplexVector> vectors;
    for (int m = 0; m < mix; ++m) {
      alphas.push_back(std::polar(1.0, 2.0 * M_PI * unit(rng)));
      ComplexVector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
      vectors.push_back(v);
    }
    KernelMatrix k = admissible_mixture(nodes, alphas, vectors, options.szego_weight);
    if (lambda_min(k.gram) >= 1e-12) return k;
  }
  throw ConvergenceError("random_admissible: degenerate draws (lambda_min < 1e-12) after 10 attempts", 0.0);
}

}  // namespace gamma_pick
