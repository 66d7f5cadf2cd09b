#include <doctest.h>

#include <random>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/geometry.hpp"
#include "oracles.hpp"

using namespace gamma_pick;

TEST_CASE("symmetrize") {
  CHECK(symmetrize(cplx(0), cplx(0)) == std::pair<cplx, cplx>(0.0, 0.0));
  const auto [s, p] = symmetrize(cplx(0.5), cplx(0.5));
  CHECK(s == cplx(1.0));
  CHECK(p == cplx(0.25));
  const auto [s2, p2] = symmetrize(cplx(0.9), cplx(-0.9));
  CHECK(std::abs(s2) == 0.0);
  CHECK(std::abs(p2 - cplx(-0.81)) <= 1e-15);
  const cplx a(0.3, -0.2), b(-0.1, 0.7);
  CHECK(symmetrize(a, b) == symmetrize(b, a));
}

TEST_CASE("phi examples") {
  const cplx s(0.4, -0.3), p(0.1, 0.2);
  CHECK(std::abs(phi(cplx(0), s, p) + s / 2.0) <= 1e-16);
  CHECK(std::abs(phi(cplx(0.3, 0.4), cplx(0), cplx(0))) == 0.0);
  for (double arg : {0.0, 1.0, 2.5, -2.0}) {
    CHECK(std::abs(phi(std::polar(1.0, arg), cplx(1.0), cplx(0.25)) - cplx(-0.5)) <= 1e-15);
  }
  const cplx z(0.2, 0.6);
  CHECK(std::abs(phi(cplx(0.5, -0.5), 2.0 * z, z * z) + z) <= 1e-15);
  CHECK_THROWS_AS(phi(cplx(1.0), cplx(2.0), cplx(1.0)), DomainError);
}

TEST_CASE("sup_phi examples") {
  CHECK(sup_phi(0.0, 0.0).sup <= 1e-15);
  CHECK(sup_phi(1.0, 0.25).sup == doctest::Approx(0.5).epsilon(1e-10));
  const SupPhi r = sup_phi(0.0, -0.81);
  CHECK(std::abs(r.sup - 0.81) <= 1e-10);
  CHECK(std::abs(std::abs(r.witness_alpha) - 1.0) <= 1e-14);
}

TEST_CASE("sup_phi matches the closed form and the interior grid") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const cplx z1 = oracle::disk(rng, 0.99), z2 = oracle::disk(rng, 0.99);
    const auto [s, p] = symmetrize(z1, z2);
    const SupPhi r = sup_phi(s, p);
    CHECK(std::abs(r.sup - oracle::sup_phi(s, p)) <= 1e-9);
    CHECK(std::abs(std::abs(phi(r.witness_alpha, s, p)) - r.sup) <= 1e-12);
    if (k < 20) {
      const double grid = oracle::sup_phi_grid(s, p, 512, 64);
      CHECK(grid <= r.sup + 1e-10);
      CHECK(r.sup - grid <= 0.05);
    }
  }
}

TEST_CASE("sup_phi on the diagonal equals |z|") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const cplx z = oracle::disk(rng, 0.999);
    CHECK(std::abs(sup_phi(2.0 * z, z * z).sup - std::abs(z)) <= 1e-10);
  }
}

TEST_CASE("membership") {
  const Membership origin = is_member(0.0, 0.0);
  CHECK(origin.member);
  CHECK(*origin.margin == doctest::Approx(1.0));
  CHECK_FALSE(is_member(2.0, 1.0).member);
  const Membership m = is_member(1.0, 0.25);
  CHECK(m.member);
  CHECK(*m.margin == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(is_member(0.0, 1.0).member);
  CHECK_FALSE(is_member(3.0, 0.0).member);
  CHECK_THROWS_AS(GPoint::make(2.0, 1.0), DomainError);
  CHECK_FALSE(GPoint::try_make(0.0, 1.5).has_value());
}

TEST_CASE("membership agrees with the symmetrization of the bidisk") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const cplx z1 = oracle::disk(rng, 0.999), z2 = oracle::disk(rng, 0.999);
    const auto [s, p] = symmetrize(z1, z2);
    const Membership m = is_member(s, p);
    CHECK(m.member);
    CHECK(std::abs(s) < 2.0);
    CHECK(std::abs(p) < 1.0);
    // Relabeling the preimage does not change anything.
    const auto [s2, p2] = symmetrize(z2, z1);
    CHECK(phi(cplx(0.6, 0.8), s, p) == phi(cplx(0.6, 0.8), s2, p2));
  }
  for (int k = 0; k < 500; ++k) {
    const cplx z1 = std::polar(1.001 + 2.0 * u(rng), 2 * M_PI * u(rng));
    const cplx z2 = std::polar(1.001 + 2.0 * u(rng), 2 * M_PI * u(rng));
    const auto [s, p] = symmetrize(z1, z2);
    CHECK_FALSE(is_member(s, p).member);
  }
}

TEST_CASE("sample_g is deterministic and inside G") {
  const auto a = sample_g(1, 42), b = sample_g(1, 42);
  CHECK(a == b);
  const auto pts = sample_g(500, 7);
  CHECK(pts.size() == 500);
  for (const GPoint& x : pts) {
    CHECK(std::abs(x.p()) < 1.0);
    CHECK(sup_phi(x.s(), x.p()).sup < 1.0);
    CHECK(x.margin() > 0.0);
  }
  CHECK(sample_g(500, 7) == pts);
  CHECK_FALSE(sample_g(5, 8) == sample_g(5, 9));
}
