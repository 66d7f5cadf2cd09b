#pragma once

// Closed-form reference values used by the tests. None of these call the
// library code they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using cplx = std::complex<double>;

/// sup over |alpha| <= 1 of |(2 alpha p - s) / (2 - alpha s)| for |s| < 2.
/// The map is Moebius in alpha, so the image of the closed disk is a disk
/// with center c and radius r and the sup is |c| + r.
inline double sup_phi(cplx s, cplx p) {
  return (2.0 * std::abs(s - p * std::conj(s)) + std::abs(s * s - 4.0 * p)) / (4.0 - std::norm(s));
}

/// Brute force over a polar grid of the closed unit disk.
inline double sup_phi_grid(cplx s, cplx p, int radial, int angular) {
  double best = 0.0;
  for (int i = 0; i <= radial; ++i) {
    for (int k = 0; k < angular; ++k) {
      const cplx alpha = std::polar(double(i) / radial, 2.0 * M_PI * k / angular);
      best = std::max(best, std::abs((2.0 * alpha * p - s) / (2.0 - alpha * s)));
    }
  }
  return best;
}

/// Extremal norm of two-point data (z1, w1), (z2, w2) on the unit disk:
/// the square root of the largest x with
/// det [[(x - |w1|^2) / (1 - |z1|^2), (x - w1 conj(w2)) / (1 - z1 conj(z2))], [., (x - |w2|^2) / (1 - |z2|^2)]] = 0.
inline double disk_two_point_norm(cplx z1, cplx z2, cplx w1, cplx w2) {
  const double a = std::norm(w1), b = std::norm(w2);
  const cplx c = w1 * std::conj(w2);
  const double d = std::norm(1.0 - z1 * std::conj(z2));
  const double e = (1.0 - std::norm(z1)) * (1.0 - std::norm(z2));
  // (x - a)(x - b) d - (x^2 - 2 x Re c + |c|^2) e = 0
  const double qa = d - e;
  const double qb = -(a + b) * d + 2.0 * c.real() * e;
  const double qc = a * b * d - std::norm(c) * e;
  const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
  const double x = (-qb + disc) / (2.0 * qa);
  return std::sqrt(std::max({x, a, b}));
}

/// Area-uniform point of the disk of the given radius.
template <typename Rng>
cplx disk(Rng& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}

}  // namespace oracle
