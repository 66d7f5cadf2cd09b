#include "gamma_pick/realization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/parallel.hpp"

namespace gamma_pick {

GnsVectors gns_vectors(const DecompositionCertificate& cert, double rank_tol) {
  GnsVectors out;
  if (cert.blocks.empty()) return out;
  const Eigen::Index n = cert.blocks.front().dim();
  double top = 0.0;
  for (const auto& b : cert.blocks) top = std::max(top, lambda_max(b));
  const double cutoff = rank_tol * top;
  const double negative_tol = 1e-9 * std::max(1.0, top);
  Eigen::Index total = 0;
  for (std::size_t m = 0; m < cert.blocks.size(); ++m) {
    try {
      out.block_columns.push_back(psd_factor_absolute(cert.blocks[m], cutoff, negative_tol));
    } catch (const NotPsdError& e) {
      throw NotPsdError("gns_vectors: block " + std::to_string(m) + ": " + e.what(), e.eigenvalue());
    }
    total += out.block_columns.back().cols();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    ComplexVector h(total);
    Eigen::Index offset = 0;
    for (const auto& l : out.block_columns) {
      h.segment(offset, l.cols()) = l.row(i).transpose();
      offset += l.cols();
    }
    out.embeddings.push_back(std::move(h));
  }
  return out;
}

ComplexMatrix Colligation::unitary() const {
  const Eigen::Index r = D.rows();
  ComplexMatrix v(r + 1, r + 1);
  v(0, 0) = A;
  v.block(0, 1, 1, r) = B;
  v.block(1, 0, r, 1) = C;
  v.block(1, 1, r, r) = D;
  return v;
}

double kernel_identity_error(const PickProblem& problem, const DecompositionCertificate& cert) {
  const double t2 = cert.scale * cert.scale;
  const HermitianMatrix sum = decomposition_sum(problem.nodes, cert.alphas, cert.blocks);
  const ComplexVector w = problem.target_vector();
  double err = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      err = std::max(err, std::abs(1.0 - w(i) * std::conj(w(j)) / t2 - sum(i, j) / t2));
    }
  }
  return err;
}

namespace {

// Orthonormal basis of C^dim whose first columns span the columns of q
// (q must already have orthonormal columns).
ComplexMatrix complete_basis(const ComplexMatrix& q, Eigen::Index dim) {
  ComplexMatrix out(dim, dim);
  if (q.cols() == 0) return ComplexMatrix::Identity(dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(q);
  const ComplexMatrix full = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  out.leftCols(q.cols()) = q;
  out.rightCols(dim - q.cols()) = full.rightCols(dim - q.cols());
  return out;
}

// Closest matrix with orthonormal columns (polar factor).
ComplexMatrix polar_orthonormal(const ComplexMatrix& m) {
  if (m.cols() == 0) return m;
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Colligation zero_function(std::size_t) {
  // Coordinate-function colligation with scale 0: realizes f = 0 * phi(1, .).
  Colligation c;
  c.alphas = {1.0};
  c.block_dims = {1};
  c.A = 0.0;
  c.B = ComplexMatrix::Ones(1, 1);
  c.C = ComplexMatrix::Ones(1, 1);
  c.D = ComplexMatrix::Zero(1, 1);
  c.scale = 0.0;
  return c;
}

}  // namespace

Colligation build_colligation(const PickProblem& problem, const DecompositionCertificate& cert) {
  if (cert.blocks.size() != cert.alphas.size()) throw MismatchError("build_colligation: alphas and blocks differ in length");
  for (const auto& b : cert.blocks) {
    if (b.dim() != static_cast<Eigen::Index>(problem.size())) {
      throw MismatchError("build_colligation: block dimension does not match the problem");
    }
  }
  if (cert.scale == 0.0) {
    if (problem.max_abs_target() != 0.0) throw MismatchError("build_colligation: zero scale with nonzero targets");
    return zero_function(problem.size());
  }
  const double t = cert.scale;
  const Eigen::Index n = problem.size();

  DecompositionCertificate unit = cert;
  for (auto& b : unit.blocks) b = (1.0 / (t * t)) * b;
  const GnsVectors gns = gns_vectors(unit);

  Colligation col;
  col.alphas = cert.alphas;
  col.scale = t;
  for (const auto& l : gns.block_columns) col.block_dims.push_back(static_cast<int>(l.cols()));
  const Eigen::Index r = gns.embeddings.empty() ? 0 : gns.embeddings.front().size();
  const Eigen::Index dim = r + 1;

  ComplexMatrix u(dim, n), v(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u(0, i) = 1.0;
    v(0, i) = problem.targets[i] / t;
    Eigen::Index offset = 0;
    for (std::size_t m = 0; m < gns.block_columns.size(); ++m) {
      const Eigen::Index rm = gns.block_columns[m].cols();
      const cplx ph = phi(cert.alphas[m], problem.nodes[i]);
      u.block(offset + 1, i, rm, 1) = ph * gns.embeddings[i].segment(offset, rm);
      v.block(offset + 1, i, rm, 1) = gns.embeddings[i].segment(offset, rm);
      offset += rm;
    }
  }

  // The lurking isometry is well defined exactly when the Grams agree.
  const ComplexMatrix gram_gap = u.adjoint() * u - v.adjoint() * v;
  Eigen::Index wi = 0, wj = 0;
  const double worst = gram_gap.cwiseAbs().maxCoeff(&wi, &wj);
  if (worst > 1e-6) {
    throw MismatchError("build_colligation: Gram mismatch " + std::to_string(worst) + " at (" + std::to_string(wj) +
                        ", " + std::to_string(wi) + ")");
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector sigma = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > 1e-10 * sigma(0)) ++rank;
  }
  const ComplexMatrix p = svd.matrixU().leftCols(rank);
  ComplexMatrix image = v * svd.matrixV().leftCols(rank);
  for (Eigen::Index k = 0; k < rank; ++k) image.col(k) /= sigma(k);
  const ComplexMatrix q = polar_orthonormal(image);
  const ComplexMatrix vmat = complete_basis(q, dim) * complete_basis(p, dim).adjoint();

  col.A = vmat(0, 0);
  col.B = vmat.block(0, 1, 1, r);
  col.C = vmat.block(1, 0, r, 1);
  col.D = vmat.block(1, 1, r, r);
  const ComplexMatrix eye = ComplexMatrix::Identity(dim, dim);
  col.isometry_defect = spectral_norm(ComplexMatrix(vmat.adjoint() * vmat - eye));
  col.coisometry_defect = spectral_norm(ComplexMatrix(vmat * vmat.adjoint() - eye));
  double map_residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) map_residual = std::max(map_residual, (vmat * u.col(i) - v.col(i)).norm());
  col.map_residual = map_residual;
  col.kernel_identity_error = kernel_identity_error(problem, cert);
  return col;
}

cplx evaluate(const RealizedFunction& fn, const GPoint& x) {
  const Colligation& c = fn.colligation;
  const Eigen::Index r = c.D.rows();
  if (r == 0) return c.A;
  ComplexVector z(r);
  Eigen::Index offset = 0;
  for (std::size_t m = 0; m < c.block_dims.size(); ++m) {
    z.segment(offset, c.block_dims[m]).setConstant(phi(c.alphas[m], x));
    offset += c.block_dims[m];
  }
  const ComplexMatrix resolvent = ComplexMatrix::Identity(r, r) - c.D * z.asDiagonal();
  Eigen::PartialPivLU<ComplexMatrix> lu(resolvent);
  if (!(lu.rcond() >= 1e-12)) throw DomainError("evaluate: resolvent is ill-conditioned at this point");
  const ComplexVector y = lu.solve(c.C);
  return c.A + (c.B * z.asDiagonal() * y)(0, 0);
}

cplx evaluate_scaled(const RealizedFunction& fn, const GPoint& x) { return fn.colligation.scale * evaluate(fn, x); }

double norm_audit(const RealizedFunction& fn, std::size_t samples, std::uint64_t seed, unsigned threads) {
  const std::vector<GPoint> pts = sample_g(samples, seed);
  std::vector<double> values(pts.size());
  detail::parallel_for(pts.size(), threads, [&](std::size_t i) { values[i] = std::abs(evaluate(fn, pts[i])); });
  double sup = 0.0;
  for (double v : values) sup = std::max(sup, v);
  return sup;
}

RealizedFunction realize(const PickProblem& problem, const DecompositionCertificate& cert, std::size_t audit_samples,
                         std::uint64_t seed, unsigned threads) {
  RealizedFunction fn{build_colligation(problem, cert), std::nullopt};
  if (audit_samples > 0) {
    fn.norm_audit = NormAudit{static_cast<int>(audit_samples), norm_audit(fn, audit_samples, seed, threads)};
  }
  return fn;
}

}  // namespace gamma_pick
