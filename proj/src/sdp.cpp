#include "gamma_pick/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gamma_pick::sdp {
namespace {

using Blocks = std::vector<ComplexMatrix>;

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i].adjoint() * b[i]).trace().real();
  return acc;
}

double frobenius(const Blocks& a) {
  double acc = 0.0;
  for (const auto& m : a) acc += m.squaredNorm();
  return std::sqrt(acc);
}

class Operator {
 public:
  explicit Operator(const Problem& p) : p_(p) {
    active_.resize(p.block_sizes.size());
    for (std::size_t k = 0; k < p.constraints.size(); ++k) {
      for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
        if (!p.constraints[k].blocks[b].empty()) active_[b].push_back(static_cast<int>(k));
      }
    }
  }

  int constraint_count() const { return static_cast<int>(p_.constraints.size()); }

  RealVector apply(const Blocks& x) const {
    RealVector out = RealVector::Zero(constraint_count());
    for (std::size_t b = 0; b < x.size(); ++b) {
      for (int k : active_[b]) {
        double acc = 0.0;
        for (const Entry& e : p_.constraints[k].blocks[b]) acc += (std::conj(e.value) * x[b](e.row, e.col)).real();
        out(k) += acc;
      }
    }
    return out;
  }

  Blocks adjoint(const RealVector& y) const {
    Blocks out;
    for (int n : p_.block_sizes) out.push_back(ComplexMatrix::Zero(n, n));
    for (std::size_t b = 0; b < out.size(); ++b) {
      for (int k : active_[b]) {
        for (const Entry& e : p_.constraints[k].blocks[b]) out[b](e.row, e.col) += y(k) * e.value;
      }
    }
    return out;
  }

  /// M_kl = Re sum_b tr(A_k X A_l W).
  Eigen::MatrixXd schur(const Blocks& x, const Blocks& w) const {
    const int m = constraint_count();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t b = 0; b < x.size(); ++b) {
      const auto& act = active_[b];
      const int n = p_.block_sizes[b];
      for (int l : act) {
        ComplexMatrix g = ComplexMatrix::Zero(n, n);  // X A_l W
        for (const Entry& e : p_.constraints[l].blocks[b]) g += e.value * x[b].col(e.row) * w[b].row(e.col);
        for (int k : act) {
          cplx acc = 0.0;
          for (const Entry& e : p_.constraints[k].blocks[b]) acc += e.value * g(e.col, e.row);
          out(k, l) += acc.real();
        }
      }
    }
    return 0.5 * (out + out.transpose());
  }

 private:
  const Problem& p_;
  std::vector<std::vector<int>> active_;
};

// Largest alpha with m + alpha * dm PSD (infinity when unbounded).
double max_step(const ComplexMatrix& m, const ComplexMatrix& dm) {
  Eigen::LLT<ComplexMatrix> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  const ComplexMatrix linv_dm = llt.matrixL().solve(dm);
  const ComplexMatrix s = llt.matrixL().solve(linv_dm.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(s), Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step(const Blocks& m, const Blocks& dm) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < m.size(); ++b) step = std::min(step, max_step(m[b], dm[b]));
  return step;
}

RealVector solve_schur(const Eigen::MatrixXd& m, const RealVector& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() == Eigen::Success) return ldlt.solve(rhs);
  return m.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::NearOptimal: return "near_optimal";
    case Status::IterationLimit: return "iteration_limit";
    case Status::Stalled: return "stalled";
  }
  return "unknown";
}

Solution solve(const Problem& problem, const Options& options) {
  const std::size_t nb = problem.block_sizes.size();
  const Operator op(problem);
  const int mc = op.constraint_count();
  RealVector b(mc);
  for (int k = 0; k < mc; ++k) b(k) = problem.constraints[k].rhs;

  int total_dim = 0;
  for (int n : problem.block_sizes) total_dim += n;

  // Starting point scaled to the data.
  double max_a = 0.0;
  double max_ratio = 0.0;
  for (int k = 0; k < mc; ++k) {
    double na = 0.0;
    for (const auto& blk : problem.constraints[k].blocks) {
      for (const Entry& e : blk) na += std::norm(e.value);
    }
    na = std::sqrt(na);
    max_a = std::max(max_a, na);
    max_ratio = std::max(max_ratio, (1.0 + std::abs(b(k))) / (1.0 + na));
  }
  const double c_norm = frobenius(problem.objective);
  const double zeta = std::max({10.0, std::sqrt(double(total_dim)), total_dim * max_ratio});
  const double eta = std::max({10.0, std::sqrt(double(total_dim)), max_a, c_norm});

  Blocks x, z;
  for (int n : problem.block_sizes) {
    x.push_back(zeta * ComplexMatrix::Identity(n, n));
    z.push_back(eta * ComplexMatrix::Identity(n, n));
  }
  RealVector y = RealVector::Zero(mc);

  Solution sol;
  const double b_norm = b.norm();
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const RealVector rp = b - op.apply(x);
    const Blocks aty = op.adjoint(y);
    Blocks rd(nb);
    for (std::size_t i = 0; i < nb; ++i) rd[i] = problem.objective[i] - aty[i] - z[i];

    const double xz = inner(x, z);
    const double mu = xz / total_dim;
    sol.primal_objective = inner(problem.objective, x);
    sol.dual_objective = b.dot(y);
    sol.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    sol.dual_infeasibility = frobenius(rd) / (1.0 + c_norm);
    sol.relative_gap = xz / (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    sol.iterations = iter;
    if (sol.primal_infeasibility < options.tolerance && sol.dual_infeasibility < options.tolerance &&
        sol.relative_gap < options.tolerance) {
      sol.status = Status::Optimal;
      break;
    }
    if (iter == options.max_iterations) {
      sol.status = Status::IterationLimit;
      break;
    }

    Blocks w(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      Eigen::LLT<ComplexMatrix> llt(z[i]);
      w[i] = hermitian_part(llt.solve(ComplexMatrix::Identity(z[i].rows(), z[i].cols())));
    }
    const Eigen::MatrixXd schur = op.schur(x, w);

    // Shared part of the right-hand side: A(H(X Rd W)).
    Blocks xrdw(nb);
    for (std::size_t i = 0; i < nb; ++i) xrdw[i] = hermitian_part(x[i] * rd[i] * w[i]);
    const RealVector a_xrdw = op.apply(xrdw);

    auto direction = [&](const Blocks& rc, Blocks& dx, RealVector& dy, Blocks& dz) {
      Blocks rcw(nb);
      for (std::size_t i = 0; i < nb; ++i) rcw[i] = hermitian_part(rc[i] * w[i]);
      dy = solve_schur(schur, rp - op.apply(rcw) + a_xrdw);
      const Blocks atdy = op.adjoint(dy);
      dz.resize(nb);
      dx.resize(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        dz[i] = hermitian_part(rd[i] - atdy[i]);
        dx[i] = hermitian_part((rc[i] - x[i] * dz[i]) * w[i]);
      }
    };

    // Predictor.
    Blocks rc(nb);
    for (std::size_t i = 0; i < nb; ++i) rc[i] = -x[i] * z[i];
    Blocks dx, dz;
    RealVector dy;
    direction(rc, dx, dy, dz);
    double ap = std::min(1.0, options.step_fraction * max_step(x, dx));
    double ad = std::min(1.0, options.step_fraction * max_step(z, dz));
    Blocks xa(nb), za(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      xa[i] = x[i] + ap * dx[i];
      za[i] = z[i] + ad * dz[i];
    }
    const double mu_aff = inner(xa, za) / total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (std::size_t i = 0; i < nb; ++i) {
      rc[i] = sigma * mu * ComplexMatrix::Identity(x[i].rows(), x[i].cols()) - x[i] * z[i] - dx[i] * dz[i];
    }
    direction(rc, dx, dy, dz);
    ap = std::min(1.0, options.step_fraction * max_step(x, dx));
    ad = std::min(1.0, options.step_fraction * max_step(z, dz));
    if (ap < 1e-10 && ad < 1e-10) {
      sol.status = Status::Stalled;
      break;
    }
    for (std::size_t i = 0; i < nb; ++i) {
      x[i] = hermitian_part(x[i] + ap * dx[i]);
      z[i] = hermitian_part(z[i] + ad * dz[i]);
    }
    y += ad * dy;
  }

  if (sol.status != Status::Optimal) {
    const double loose = std::sqrt(options.tolerance) * 1e-2;
    if (sol.primal_infeasibility < loose && sol.dual_infeasibility < loose && sol.relative_gap < loose) {
      sol.status = Status::NearOptimal;
    }
  }
  sol.x = std::move(x);
  sol.z = std::move(z);
  sol.y = std::move(y);
  return sol;
}

}  // namespace gamma_pick::sdp
