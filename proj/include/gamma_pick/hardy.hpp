#pragma once

// Numerical cross-checks of the Hardy space kernels of G.

#include <cstdint>
#include <vector>

namespace gamma_pick {

struct HardyCheckReport {
  int samples = 0;
  double max_identity_error = 0.0;     // relative; absolute below magnitude 1e-8
  double admissibility_min_eig = 0.0;  // worst slack over the normalized Szego grams
  double gram_min_eig = 0.0;           // smallest lambda_min of the raw Szego grams
  std::vector<int> node_set_sizes;

  bool ok() const { return max_identity_error <= 1e-10 && admissibility_min_eig >= -1e-9; }
};

/// antisym_kernel(z, w) against 0.5 (z1 - z2) conj(w1 - w2) szego(pi(z), pi(w))
/// on seeded samples with |z_i|, |w_i| <= 0.95, every fourth one near the diagonal z1 = z2.
HardyCheckReport kernel_identity_check(int samples, std::uint64_t seed, unsigned threads = 1);

/// normalize_diag(szego_gram) through admissibility_report on node_sets random
/// node sets of sizes 1..max_n.
HardyCheckReport szego_admissibility_check(int node_sets, int max_n, std::uint64_t seed, int alpha_grid = 256,
                                           unsigned threads = 1);

}  // namespace gamma_pick
