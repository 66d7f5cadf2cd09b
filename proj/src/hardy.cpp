#include "gamma_pick/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/kernels.hpp"
#include "gamma_pick/parallel.hpp"

namespace gamma_pick {

HardyCheckReport kernel_identity_check(int samples, std::uint64_t seed, unsigned threads) {
  if (samples < 1) throw DomainError("kernel_identity_check: samples must be at least 1");
  std::vector<double> errors(samples);
  detail::parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t k) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + k);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto point = [&] { return 0.95 * disk_point(u(rng), u(rng)); };
    const cplx z1 = point();
    cplx z2 = point();
    const cplx w1 = point();
    const cplx w2 = point();
    if (k % 4 == 3) {
      const double gap = std::pow(10.0, -12.0 * u(rng));
      z2 = z1 + gap * std::polar(1.0, 2.0 * M_PI * u(rng));
      if (std::abs(z2) > 0.95) z2 = z1 - (z2 - z1);
    }
    const cplx lhs = antisym_kernel(z1, z2, w1, w2);
    const auto [s1, p1] = symmetrize(z1, z2);
    const auto [s2, p2] = symmetrize(w1, w2);
    const cplx rhs = 0.5 * (z1 - z2) * std::conj(w1 - w2) * szego(s1, p1, s2, p2);
    const double scale = std::abs(lhs) >= 1e-8 ? std::abs(lhs) : 1.0;
    errors[k] = std::abs(lhs - rhs) / scale;
  });
  HardyCheckReport report;
  report.samples = samples;
  for (double e : errors) report.max_identity_error = std::max(report.max_identity_error, e);
  return report;
}

HardyCheckReport szego_admissibility_check(int node_sets, int max_n, std::uint64_t seed, int alpha_grid,
                                           unsigned threads) {
  if (max_n < 1) throw DomainError("szego_admissibility_check: max_n must be at least 1");
  HardyCheckReport report;
  report.admissibility_min_eig = std::numeric_limits<double>::infinity();
  report.gram_min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < node_sets; ++k) {
    const int n = 1 + k % max_n;
    const NodeSet nodes(sample_g(n, seed * 0x9E3779B97F4A7C15ULL + k));
    const HermitianMatrix gram = szego_gram(nodes);
    report.gram_min_eig = std::min(report.gram_min_eig, lambda_min(gram));
    const AdmissibilityReport r = admissibility_report(normalize_diag(KernelMatrix(nodes, gram)), alpha_grid, 1e-10,
                                                       threads);
    report.admissibility_min_eig = std::min(report.admissibility_min_eig, r.slack());
    report.node_set_sizes.push_back(n);
  }
  report.samples = node_sets;
  return report;
}

}  // namespace gamma_pick
