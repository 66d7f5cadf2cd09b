#pragma once

// Dense complex linear algebra shared by every module: a Hermitian matrix
// type whose storage is exactly Hermitian, eigendecomposition, projection
// onto the PSD cone, Gram factorization and the largest eigenvalue of a
// Hermitian pencil.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "gamma_pick/errors.hpp"

namespace gamma_pick {

using cplx = std::complex<double>;

template <typename RealScalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<RealScalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename RealScalar>
using ComplexVectorT = Eigen::Matrix<std::complex<RealScalar>, Eigen::Dynamic, 1>;
template <typename RealScalar>
using RealVectorT = Eigen::Matrix<RealScalar, Eigen::Dynamic, 1>;

using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = RealVectorT<double>;

/// Square complex matrix with entries(i,j) == conj(entries(j,i)) bit for bit.
///
/// Construction takes the Hermitian part (m + m*)/2 and then mirrors the
/// strict upper triangle, so the diagonal is real and the symmetry holds
/// exactly regardless of rounding in the caller's arithmetic.
template <typename RealScalar>
class BasicHermitian {
 public:
  using Scalar = std::complex<RealScalar>;
  using Matrix = ComplexMatrixT<RealScalar>;

  BasicHermitian() = default;

  explicit BasicHermitian(Eigen::Index dim) : m_(Matrix::Zero(dim, dim)) {}

  template <typename Derived>
  explicit BasicHermitian(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      throw DomainError("Hermitian matrix must be square, got " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
    }
    m_ = m.template cast<Scalar>();
    const Eigen::Index n = m_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(m_(i, i).real()) || !std::isfinite(m_(i, i).imag())) {
        throw DomainError("Hermitian matrix has a non-finite entry");
      }
      m_(i, i) = Scalar(m_(i, i).real(), 0);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Scalar avg = (m_(i, j) + std::conj(m_(j, i))) / RealScalar(2);
        if (!std::isfinite(avg.real()) || !std::isfinite(avg.imag())) {
          throw DomainError("Hermitian matrix has a non-finite entry");
        }
        m_(i, j) = avg;
        m_(j, i) = std::conj(avg);
      }
    }
  }

  static BasicHermitian identity(Eigen::Index dim) { return BasicHermitian(Matrix::Identity(dim, dim)); }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  RealScalar frobenius_norm() const { return m_.norm(); }

  friend BasicHermitian operator+(const BasicHermitian& a, const BasicHermitian& b) {
    return BasicHermitian(a.m_ + b.m_);
  }
  friend BasicHermitian operator-(const BasicHermitian& a, const BasicHermitian& b) {
    return BasicHermitian(a.m_ - b.m_);
  }
  friend BasicHermitian operator*(RealScalar c, const BasicHermitian& a) { return BasicHermitian(c * a.m_); }

 private:
  Matrix m_;
};

using HermitianMatrix = BasicHermitian<double>;

/// Schur (entrywise) product. The product of two Hermitian matrices is Hermitian.
template <typename RealScalar>
BasicHermitian<RealScalar> schur(const BasicHermitian<RealScalar>& a, const BasicHermitian<RealScalar>& b) {
  if (a.dim() != b.dim()) throw MismatchError("schur: dimension mismatch");
  return BasicHermitian<RealScalar>(a.matrix().cwiseProduct(b.matrix()));
}

template <typename RealScalar>
struct EigenDecomposition {
  RealVectorT<RealScalar> values;        // ascending
  ComplexMatrixT<RealScalar> vectors;    // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
template <typename RealScalar>
EigenDecomposition<RealScalar> eigh(const BasicHermitian<RealScalar>& m) {
  if (m.dim() < 1) throw DomainError("eigh: empty matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrixT<RealScalar>> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    const RealScalar residual =
        (m.matrix() * solver.eigenvectors() - solver.eigenvectors() * solver.eigenvalues().asDiagonal()).norm();
    throw ConvergenceError("eigh: QL iteration did not converge", static_cast<double>(residual));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename RealScalar>
RealScalar lambda_min(const BasicHermitian<RealScalar>& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrixT<RealScalar>> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("lambda_min: no convergence", 0.0);
  return solver.eigenvalues()(0);
}

template <typename RealScalar>
RealScalar lambda_max(const BasicHermitian<RealScalar>& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrixT<RealScalar>> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("lambda_max: no convergence", 0.0);
  return solver.eigenvalues()(m.dim() - 1);
}

/// Frobenius-nearest PSD matrix (negative eigenvalues clipped to zero).
template <typename RealScalar>
BasicHermitian<RealScalar> psd_project(const BasicHermitian<RealScalar>& m) {
  if (m.dim() == 0) return m;
  const auto eig = eigh(m);
  if (eig.values(0) >= RealScalar(0)) return m;
  const RealVectorT<RealScalar> clipped = eig.values.cwiseMax(RealScalar(0));
  return BasicHermitian<RealScalar>(eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint());
}

/// Gram factor L (dim x r) with L L* = m, dropping eigenvalues at or below
/// `cutoff` (absolute). Eigenvalues below -negative_tol raise NotPsdError.
template <typename RealScalar>
ComplexMatrixT<RealScalar> psd_factor_absolute(const BasicHermitian<RealScalar>& m, RealScalar cutoff,
                                               RealScalar negative_tol) {
  if (m.dim() == 0) return ComplexMatrixT<RealScalar>(0, 0);
  const auto eig = eigh(m);
  if (eig.values(0) < -negative_tol) {
    throw NotPsdError("psd_factor: matrix is not PSD (lambda_min = " + std::to_string(double(eig.values(0))) + ")",
                      static_cast<double>(eig.values(0)));
  }
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    if (eig.values(i) > cutoff) ++rank;
  }
  ComplexMatrixT<RealScalar> factor(m.dim(), rank);
  Eigen::Index col = 0;
  // Largest eigenvalues first.
  for (Eigen::Index i = m.dim() - 1; i >= 0; --i) {
    if (eig.values(i) > cutoff) factor.col(col++) = eig.vectors.col(i) * std::sqrt(eig.values(i));
  }
  return factor;
}

/// Gram factor with numerical-rank cutoff rank_tol * lambda_max.
/// Requires lambda_min >= -rank_tol (scaled by max(1, lambda_max)).
template <typename RealScalar>
ComplexMatrixT<RealScalar> psd_factor(const BasicHermitian<RealScalar>& m, RealScalar rank_tol = RealScalar(1e-10)) {
  if (m.dim() == 0) return ComplexMatrixT<RealScalar>(0, 0);
  const RealScalar top = std::max(lambda_max(m), RealScalar(0));
  return psd_factor_absolute(m, rank_tol * top, rank_tol * std::max(RealScalar(1), top));
}

/// Largest eigenvalue of the pencil (a, b): max over x != 0 of x*ax / x*bx.
/// `b` must be strictly positive definite.
template <typename RealScalar>
RealScalar pencil_max(const BasicHermitian<RealScalar>& a, const BasicHermitian<RealScalar>& b) {
  if (a.dim() != b.dim()) throw MismatchError("pencil_max: dimension mismatch");
  const auto eb = eigh(b);
  if (!(eb.values(0) > RealScalar(0))) {
    throw NotPsdError("pencil_max: b is not positive definite (lambda_min = " + std::to_string(double(eb.values(0))) +
                          ")",
                      static_cast<double>(eb.values(0)));
  }
  const RealVectorT<RealScalar> inv_sqrt = eb.values.cwiseSqrt().cwiseInverse();
  const ComplexMatrixT<RealScalar> w = eb.vectors * inv_sqrt.asDiagonal() * eb.vectors.adjoint();
  return lambda_max(BasicHermitian<RealScalar>(w * a.matrix() * w));
}

/// Hermitian square root of a PSD matrix (eigenvalues clipped at zero).
template <typename RealScalar>
ComplexMatrixT<RealScalar> psd_sqrt(const BasicHermitian<RealScalar>& m) {
  const auto eig = eigh(m);
  const RealVectorT<RealScalar> root = eig.values.cwiseMax(RealScalar(0)).cwiseSqrt();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

/// Spectral norm (largest singular value).
template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
  return svd.singularValues()(0);
}

}  // namespace gamma_pick
