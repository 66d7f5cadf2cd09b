#include <doctest.h>

#include "gamma_pick/hardy.hpp"
#include "gamma_pick/kernels.hpp"

using namespace gamma_pick;

TEST_CASE("identity spot value") {
  const cplx z1 = 0.5, z2 = 0.0;
  const auto [s, p] = symmetrize(z1, z2);
  const cplx rhs = 0.5 * (z1 - z2) * std::conj(z1 - z2) * szego(s, p, s, p);
  CHECK(std::abs(rhs - 1.0 / 6.0) <= 1e-15);
  CHECK(std::abs(antisym_kernel(z1, z2, z1, z2) - rhs) <= 1e-15);
}

TEST_CASE("kernel identity sweep") {
  const HardyCheckReport r = kernel_identity_check(10000, 1, 4);
  CHECK(r.samples == 10000);
  CHECK(r.max_identity_error <= 1e-10);
  const HardyCheckReport again = kernel_identity_check(10000, 1, 1);
  CHECK(again.max_identity_error == r.max_identity_error);
}

TEST_CASE("szego admissibility sweep") {
  const HardyCheckReport r = szego_admissibility_check(100, 5, 2, 256, 4);
  CHECK(r.samples == 100);
  CHECK(r.admissibility_min_eig >= -1e-9);
  CHECK(r.gram_min_eig > 0.0);
  CHECK(r.node_set_sizes.size() == 100);
  CHECK(r.ok());
}

TEST_CASE("diagonal pairs are admissible") {
  const NodeSet ns({GPoint::from_preimage(0.3, 0.3), GPoint::from_preimage(cplx(-0.2, 0.5), cplx(-0.2, 0.5))});
  const KernelMatrix k = normalize_diag(KernelMatrix(ns, szego_gram(ns)));
  CHECK(admissibility_report(k).min_eig_overall >= 0.0);
}
