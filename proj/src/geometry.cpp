#include "gamma_pick/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gamma_pick {
namespace {

constexpr int kScanSamples = 1024;
constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio

double modulus_on_circle(double theta, cplx s, cplx p) {
  return std::abs(phi(std::polar(1.0, theta), s, p));
}

// Maximize f on [lo, hi] by golden-section search.
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
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
  return fc > fd ? c : d;
}

}  // namespace

GPoint GPoint::make(cplx s, cplx p) {
  const Membership m = is_member(s, p);
  if (!m.member) {
    throw DomainError("point (" + std::to_string(s.real()) + "," + std::to_string(s.imag()) + "; " +
                      std::to_string(p.real()) + "," + std::to_string(p.imag()) + ") is not in G");
  }
  return GPoint(s, p, *m.margin);
}

std::optional<GPoint> GPoint::try_make(cplx s, cplx p) {
  const Membership m = is_member(s, p);
  if (!m.member) return std::nullopt;
  return GPoint(s, p, *m.margin);
}

GPoint GPoint::from_preimage(cplx z1, cplx z2) {
  const auto [s, p] = symmetrize(z1, z2);
  return make(s, p);
}

SupPhi sup_phi(cplx s, cplx p, double refine_tol) {
  if (!(std::abs(s) < 2.0)) throw DomainError("sup_phi: requires |s| < 2");
  const double step = 2.0 * M_PI / kScanSamples;
  int best = 0;
  double best_val = -1.0;
  for (int k = 0; k < kScanSamples; ++k) {
    const double v = modulus_on_circle(k * step, s, p);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  // |phi| is smooth in theta and the scan brackets the global maximum to one step.
  // The tolerance is on theta; |phi| is flat at the maximum, so the value error is far smaller.
  auto f = [&](double theta) { return modulus_on_circle(theta, s, p); };
  const double theta = golden_max(f, (best - 1) * step, (best + 1) * step, std::max(refine_tol, 1e-15));
  const double refined = f(theta);
  if (refined >= best_val) return {refined, std::polar(1.0, theta)};
  return {best_val, std::polar(1.0, best * step)};
}

Membership is_member(cplx s, cplx p) {
  if (!(std::abs(s) < 2.0) || !std::isfinite(std::abs(p))) return {false, std::nullopt, std::nullopt};
  const SupPhi sp = sup_phi(s, p);
  if (sp.sup < 1.0) return {true, 1.0 - sp.sup, sp};
  return {false, std::nullopt, sp};
}

std::vector<GPoint> sample_g(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GPoint> out;
  out.reserve(count);
  while (out.size() < count) {
    const cplx z1 = disk_point(unit(rng), unit(rng));
    const cplx z2 = disk_point(unit(rng), unit(rng));
    const auto [s, p] = symmetrize(z1, z2);
    // Rounding can push a preimage within 1e-16 of the circle onto the boundary.
    if (auto point = GPoint::try_make(s, p)) out.push_back(*point);
  }
  return out;
}

}  // namespace gamma_pick
