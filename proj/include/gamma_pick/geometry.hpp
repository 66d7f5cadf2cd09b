#pragma once

// The symmetrized bidisk G = {(z1 + z2, z1 z2) : |z1|, |z2| < 1} as a
// computational domain. Membership is decided through the parametrized
// coordinate functions phi(alpha, s, p) = (2 alpha p - s) / (2 - alpha s):
// (s, p) lies in G exactly when |phi(alpha, s, p)| < 1 for every |alpha| <= 1.

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/linalg.hpp"

namespace gamma_pick {

/// Symmetrization map pi(z1, z2) = (z1 + z2, z1 z2).
template <typename T>
std::pair<std::complex<T>, std::complex<T>> symmetrize(std::complex<T> z1, std::complex<T> z2) {
  return {z1 + z2, z1 * z2};
}

/// Parametrized coordinate function. Throws DomainError when 2 - alpha s vanishes.
template <typename T>
std::complex<T> phi(std::complex<T> alpha, std::complex<T> s, std::complex<T> p) {
  const std::complex<T> den = T(2) - alpha * s;
  if (std::abs(den) < T(1e-14)) throw DomainError("phi: 2 - alpha*s vanishes (point outside the closure of G?)");
  return (T(2) * alpha * p - s) / den;
}

/// A point of G with its membership margin 1 - sup_{|alpha|<=1} |phi(alpha, s, p)|.
class GPoint {
 public:
  /// Checks membership; throws DomainError for points outside G.
  static GPoint make(cplx s, cplx p);
  /// Empty when (s, p) is not in G.
  static std::optional<GPoint> try_make(cplx s, cplx p);
  static GPoint from_preimage(cplx z1, cplx z2);

  cplx s() const noexcept { return s_; }
  cplx p() const noexcept { return p_; }
  double margin() const noexcept { return margin_; }

  friend bool operator==(const GPoint& a, const GPoint& b) { return a.s_ == b.s_ && a.p_ == b.p_; }

 private:
  GPoint(cplx s, cplx p, double margin) : s_(s), p_(p), margin_(margin) {}
  cplx s_;
  cplx p_;
  double margin_;
};

inline cplx phi(cplx alpha, const GPoint& x) { return phi(alpha, x.s(), x.p()); }

struct SupPhi {
  double sup;
  cplx witness_alpha;  // on the unit circle
};

/// sup over |alpha| <= 1 of |phi(alpha, s, p)|. By maximum modulus the sup is
/// attained on |alpha| = 1: dense scan in arg(alpha) plus golden-section
/// refinement to refine_tol. Requires |s| < 2.
SupPhi sup_phi(cplx s, cplx p, double refine_tol = 1e-10);

struct Membership {
  bool member;
  std::optional<double> margin;   // 1 - sup_phi, present for members
  std::optional<SupPhi> sup;      // present whenever |s| < 2
};

/// Strict membership test (no tolerance slack).
Membership is_member(cplx s, cplx p);

/// `count` points pi(z1, z2) with z1, z2 area-uniform in the unit disk.
/// Deterministic in (count, seed).
std::vector<GPoint> sample_g(std::size_t count, std::uint64_t seed);

/// Area-uniform point of the open unit disk from two uniforms in [0, 1).
inline cplx disk_point(double u_radius, double u_angle) {
  return std::polar(std::sqrt(u_radius), 2.0 * M_PI * u_angle);
}

}  // namespace gamma_pick
