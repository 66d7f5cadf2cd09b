// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gamma_pick/extension.hpp"
#include "gamma_pick/hardy.hpp"
#include "gamma_pick/io.hpp"
#include "gamma_pick/realization.hpp"
#include "gamma_pick/verify.hpp"
#include "oracles.hpp"

using namespace gamma_pick;
namespace fs = std::filesystem;

namespace {

const unsigned kThreads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

struct Outcome {
  bool pass;
  std::string details;
};

// Colligations and subordinate pairs collected across criteria for 6 and 9.
struct Collected {
  std::vector<std::pair<double, double>> colligations;  // (isometry defect, kernel identity error)
  std::vector<double> contraction_norms;
} collected;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

PickProblem random_problem(std::uint64_t seed, int n, double wmax) {
  std::mt19937_64 rng(seed);
  std::vector<GPoint> pts;
  std::vector<cplx> w;
  for (int i = 0; i < n; ++i) {
    pts.push_back(GPoint::from_preimage(oracle::disk(rng, 0.9), oracle::disk(rng, 0.9)));
    w.push_back(oracle::disk(rng, wmax));
  }
  return PickProblem(NodeSet(pts), w);
}

RealizedFunction realize_and_collect(const PickProblem& p, const DecompositionCertificate& cert) {
  RealizedFunction f = realize(p, cert, 10000, 0, kThreads);
  collected.colligations.emplace_back(f.colligation.isometry_defect, kernel_identity_error(p, cert));
  return f;
}

Outcome membership() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int wrong = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto [s, p] = symmetrize(oracle::disk(rng, 0.999), oracle::disk(rng, 0.999));
    if (!is_member(s, p).member) ++wrong;
  }
  for (int k = 0; k < 1000; ++k) {
    const cplx z1 = std::polar(1.001 + u(rng), 2 * M_PI * u(rng));
    const cplx z2 = std::polar(1.001 + u(rng), 2 * M_PI * u(rng));
    const auto [s, p] = symmetrize(z1, z2);
    if (is_member(s, p).member) ++wrong;
  }
  return {wrong == 0, std::to_string(wrong) + " misclassified of 11000"};
}

Outcome kernel_identity() {
  const auto [s, p] = symmetrize(cplx(0.5), cplx(0.0));
  const double spot = std::abs(0.5 * 0.25 * szego(s, p, s, p) - 1.0 / 6.0) +
                      std::abs(antisym_kernel(cplx(0.5), cplx(0.0), cplx(0.5), cplx(0.0)) - 1.0 / 6.0);
  const HardyCheckReport r = kernel_identity_check(10000, 202, kThreads);
  return {r.max_identity_error <= 1e-10 && spot <= 1e-15,
          "max relative error " + fmt(r.max_identity_error) + ", spot error " + fmt(spot)};
}

Outcome szego_admissibility() {
  const HardyCheckReport r = szego_admissibility_check(100, 5, 303, 256, kThreads);
  return {r.admissibility_min_eig >= -1e-9 && r.gram_min_eig > 0,
          "min eigenvalue " + fmt(r.admissibility_min_eig) + " over 100 sets"};
}

Outcome dichotomy() {
  int primal = 0, dual = 0, bad = 0;
  double worst_residual = 0, worst_block = 0, worst_interp = 0, worst_sup = 0, worst_violation = 1e300,
         worst_slack = 1e300;
  for (int k = 0; k < 50; ++k) {
    const PickProblem p = random_problem(4000 + k, 1 + k % 3, 0.95);
    const FeasibilityVerdict v = solve_feasibility(p, 1.0);
    if (v.primal.has_value() == v.dual.has_value()) {
      ++bad;
      continue;
    }
    if (v.primal) {
      ++primal;
      const PrimalCheck c = verify_primal(p, *v.primal);
      worst_residual = std::max(worst_residual, c.residual);
      worst_block = std::min(worst_block, c.min_block_eig);
      if (!c.unit_alphas) ++bad;
      const RealizedFunction f = realize_and_collect(p, *v.primal);
      for (std::size_t i = 0; i < p.size(); ++i) {
        worst_interp = std::max(worst_interp, std::abs(evaluate_scaled(f, p.nodes[i]) - p.targets[i]));
      }
      worst_sup = std::max(worst_sup, f.norm_audit->observed_sup);
    } else {
      ++dual;
      const DualCheck c = verify_dual(p, *v.dual);
      worst_violation = std::min(worst_violation, c.violation);
      worst_slack = std::min(worst_slack, c.admissibility_slack);
      if (!c.ok(1e-6, 1e-8, 1e-10)) ++bad;
    }
  }
  const bool pass = bad == 0 && worst_residual <= 1e-6 && worst_block >= -1e-9 && worst_interp <= 1e-6 &&
                    worst_sup <= 1 + 1e-6 && (dual == 0 || (worst_violation >= 1e-6 && worst_slack >= -1e-8));
  return {pass, std::to_string(primal) + " primal / " + std::to_string(dual) + " dual; residual " +
                    fmt(worst_residual) + ", interpolation " + fmt(worst_interp) + ", sup " + fmt(worst_sup) +
                    ", min violation " + fmt(worst_violation) + ", slack " + fmt(worst_slack)};
}

Outcome diagonal_oracle() {
  const NodeSet nodes({GPoint::make(0.0, 0.0), GPoint::make(0.6, 0.09)});
  const ExtremalNormResult r1 = extremal_norm(PickProblem(nodes, {0.0, 0.3}));
  const PickProblem p5(nodes, {0.0, 0.5});
  const FeasibilityVerdict at1 = solve_feasibility(p5, 1.0);
  const bool infeasible = !at1.feasible && at1.dual && verify_dual(p5, *at1.dual).ok(1e-6, 1e-8, 1e-10);
  const ExtremalNormResult r5 = extremal_norm(p5);
  realize_and_collect(PickProblem(nodes, {0.0, 0.3}), r1.certificate_at_rho);
  realize_and_collect(p5, r5.certificate_at_rho);
  const double e1 = std::abs(r1.rho - 1.0), e5 = std::abs(r5.rho - 5.0 / 3.0);
  return {e1 <= 1e-3 && e5 <= 2e-3 && infeasible,
          "rho(0.3) = " + std::to_string(r1.rho) + ", rho(0.5) = " + std::to_string(r5.rho) +
              (infeasible ? ", infeasible at 1" : ", NOT infeasible at 1")};
}

Outcome realization_soundness() {
  double defect = 0, identity = 0;
  for (const auto& [d, e] : collected.colligations) {
    defect = std::max(defect, d);
    identity = std::max(identity, e);
  }
  return {!collected.colligations.empty() && defect <= 1e-8 && identity <= 1e-6,
          std::to_string(collected.colligations.size()) + " colligations; isometry defect " + fmt(defect) +
              ", kernel identity " + fmt(identity)};
}

Outcome duality_gap() {
  double worst_primal = 0, worst_dual = 0;
  int failures = 0;
  for (int k = 0; k < 20; ++k) {
    const PickProblem p = random_problem(7000 + k, 1 + k % 3, 1.0);
    const ExtremalNormResult r = extremal_norm(p);
    const PrimalCheck upper = verify_primal(p, r.certificate_at_rho);
    if (!upper.ok(1e-6, 1e-9)) ++failures;
    double lower = p.max_abs_target();
    std::vector<KernelMatrix> kernels;
    for (const auto* d : {&r.certificate_at_lo, &r.extremal_kernel}) {
      if (*d && verify_dual(p, **d).ok(1e-6, 1e-8, 1e-10)) {
        lower = std::max(lower, (*d)->scale);
        kernels.push_back((*d)->kernel);
      }
    }
    for (int t = 0; t < 20; ++t) kernels.push_back(random_admissible(p.nodes, 100 * k + t, std::max<int>(2, p.size())));
    double dual_sup = 0;
    for (const KernelMatrix& km : kernels) {
      const SubordinatePair pair = subordinate_pair(km);
      collected.contraction_norms.push_back(pair.contraction_norm);
      dual_sup = std::max(dual_sup, calculus_norm(pair, p.targets));
    }
    const double u = r.certificate_at_rho.scale;
    worst_primal = std::max(worst_primal, (u - lower) / u);
    worst_dual = std::max(worst_dual, (r.rho - dual_sup) / r.rho);
  }
  return {failures == 0 && worst_primal <= 1e-3 && worst_dual <= 1e-2,
          "primal bracket " + fmt(worst_primal) + ", dual gap " + fmt(worst_dual)};
}

Outcome von_neumann() {
  std::vector<ExtensionResult> results;
  const NodeSet nodes({GPoint::make(0.0, 0.0), GPoint::make(0.6, 0.09)});
  results.push_back(extend(nodes, {0.0, 0.3}));
  results.push_back(extend(nodes, {0.0, 0.5}));
  for (int k = 0; k < 8; ++k) {
    const PickProblem p = random_problem(8000 + k, 1 + k % 3, 1.0);
    results.push_back(extend(p.nodes, p.targets));
  }
  double worst_ratio = 0, worst_reach = 1e300;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const ExtensionResult& r = results[k];
    collected.colligations.emplace_back(r.interpolant.colligation.isometry_defect,
                                        r.interpolant.colligation.kernel_identity_error);
    const VonNeumannAudit a = von_neumann_audit(r, 100, 900 + k, kThreads);
    collected.contraction_norms.push_back(a.max_contraction_norm);
    collected.contraction_norms.push_back(r.audit.max_contraction_norm);
    worst_ratio = std::max(worst_ratio, a.max_ratio);
    worst_reach = std::min(worst_reach, std::max(a.max_ratio, a.extremal_ratio.value_or(0.0)));
  }
  return {worst_ratio <= 1 + 1e-6 && worst_reach >= 1 - 1e-2,
          std::to_string(results.size()) + " extensions; max ratio " + std::to_string(worst_ratio) +
              ", min extremal reach " + std::to_string(worst_reach)};
}

Outcome gamma_contraction() {
  double worst = 0;
  for (double c : collected.contraction_norms) worst = std::max(worst, c);
  return {!collected.contraction_norms.empty() && worst <= 1 + 1e-8,
          std::to_string(collected.contraction_norms.size()) + " pairs or audits; max norm " + std::to_string(worst)};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(GAMMA_PICK_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "gamma_pick_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const PickProblem p = random_problem(9001, 3, 0.9);
  io::write_json(dir / "p.json", io::to_json(p));
  const std::string problem = (dir / "p.json").string();
  int mismatches = 0, errors = 0;
  for (const char* sub : {"a", "b"}) {
    fs::create_directories(dir / sub);
    const std::string out = " --seed 11 --out " + (dir / sub).string();
    for (const std::string cmd : {"pick solve " + problem + " --scale 1", "pick norm " + problem, "extend " + problem}) {
      const int code = run_cli(cmd + out);
      if (code != 0 && code != 3) ++errors;
      if (cmd.rfind("pick solve", 0) == 0) {
        fs::rename(dir / sub / "verdict.json", dir / sub / "solve_verdict.json");
        for (const char* f : {"primal.json", "dual.json"}) {
          if (fs::exists(dir / sub / f)) fs::rename(dir / sub / f, dir / sub / (std::string("solve_") + f));
        }
      }
    }
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    ++compared;
    if (!fs::exists(dir / "b" / name) || io::read_text(entry.path()) != io::read_text(dir / "b" / name)) ++mismatches;
  }
  // In-process: the same solve twice serializes identically.
  const std::string once = io::dump(io::to_json(extremal_norm(p).certificate_at_rho_plus));
  const std::string twice = io::dump(io::to_json(extremal_norm(p).certificate_at_rho_plus));
  if (once != twice) ++mismatches;
  return {errors == 0 && mismatches == 0 && compared >= 5,
          std::to_string(compared) + " files compared, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(errors) + " command errors"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"membership oracle equivalence", membership},
      {"kernel identity", kernel_identity},
      {"Szego admissibility", szego_admissibility},
      {"certificate dichotomy", dichotomy},
      {"diagonal oracle", diagonal_oracle},
      {"realization soundness", realization_soundness},
      {"duality gap", duality_gap},
      {"von Neumann audit", von_neumann},
      {"Gamma-contraction criterion", gamma_contraction},
      {"determinism", determinism},
  };
  // Criteria 6 and 9 aggregate what 4, 5, 7 and 8 construct, so they run last.
  const std::vector<int> order = {0, 1, 2, 3, 4, 6, 7, 5, 8, 9};
  std::vector<Outcome> outcomes(criteria.size());
  std::vector<double> seconds(criteria.size());
  for (int i : order) {
    const auto start = std::chrono::steady_clock::now();
    try {
      outcomes[i] = criteria[i].second();
    } catch (const std::exception& e) {
      outcomes[i] = {false, std::string("exception: ") + e.what()};
    }
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("[%s] %zu %s: %s (%.1fs)\n", outcomes[i].pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                outcomes[i].details.c_str(), seconds[i]);
    if (!outcomes[i].pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
