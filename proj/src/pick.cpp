#include "gamma_pick/pick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gamma_pick/sdp.hpp"
#include "gamma_pick/verify.hpp"

namespace gamma_pick {

PickProblem::PickProblem(NodeSet n, std::vector<cplx> w) : nodes(std::move(n)), targets(std::move(w)) {
  if (targets.size() != nodes.size()) {
    throw MismatchError("PickProblem: " + std::to_string(nodes.size()) + " nodes but " +
                        std::to_string(targets.size()) + " targets");
  }
  for (const cplx& t : targets) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) throw DomainError("PickProblem: non-finite target");
  }
}

double PickProblem::max_abs_target() const {
  double m = 0.0;
  for (const cplx& t : targets) m = std::max(m, std::abs(t));
  return m;
}

ComplexVector PickProblem::target_vector() const {
  ComplexVector w(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) w(i) = targets[i];
  return w;
}

HermitianMatrix pick_matrix(const PickProblem& problem, const KernelMatrix& k, double scale) {
  if (!(k.nodes == problem.nodes)) throw MismatchError("pick_matrix: kernel and problem have different node sets");
  if (!(scale > 0.0)) throw DomainError("pick_matrix: scale must be positive");
  const ComplexVector w = problem.target_vector();
  const Eigen::Index n = w.size();
  const ComplexMatrix base = scale * scale * ComplexMatrix::Ones(n, n) - w * w.adjoint();
  return HermitianMatrix(base.cwiseProduct(k.gram.matrix()));
}

HermitianMatrix decomposition_sum(const NodeSet& nodes, const std::vector<cplx>& alphas,
                                  const std::vector<HermitianMatrix>& blocks) {
  const Eigen::Index n = nodes.size();
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    acc += coordinate_matrix(alphas[m], nodes).matrix().cwiseProduct(blocks[m].matrix());
  }
  return HermitianMatrix(acc);
}

DecompositionCertificate compress_certificate(const PickProblem& problem, const DecompositionCertificate& cert,
                                              double rank_tol) {
  const Eigen::Index n = problem.size();
  const Eigen::Index equations = n * n;
  double top = 0.0;
  for (const auto& b : cert.blocks) top = std::max(top, lambda_max(b));
  if (top <= 0.0) return cert;

  struct Atom {
    cplx alpha;
    ComplexMatrix e;  // coordinate matrix
    ComplexMatrix l;  // Gamma = l l*
  };
  std::vector<Atom> atoms;
  for (std::size_t m = 0; m < cert.blocks.size(); ++m) {
    ComplexMatrix l = psd_factor_absolute(cert.blocks[m], rank_tol * top, std::numeric_limits<double>::infinity());
    if (l.cols() > 0) atoms.push_back({cert.alphas[m], coordinate_matrix(cert.alphas[m], problem.nodes).matrix(), l});
  }

  // Real coordinates of a Hermitian n x n matrix: diagonal, then Re and Im above it.
  auto flatten = [n](const ComplexMatrix& m, Eigen::Ref<Eigen::VectorXd> out) {
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) out(k++) = m(i, i).real();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        out(k++) = m(i, j).real();
        out(k++) = m(i, j).imag();
      }
    }
  };
  // Hermitian r x r basis element p.
  auto basis = [](Eigen::Index r, Eigen::Index p) {
    ComplexMatrix x = ComplexMatrix::Zero(r, r);
    if (p < r) {
      x(p, p) = 1.0;
      return x;
    }
    p -= r;
    for (Eigen::Index a = 0; a < r; ++a) {
      for (Eigen::Index b = a + 1; b < r; ++b) {
        if (p == 0) {
          x(a, b) = x(b, a) = 1.0;
          return x;
        }
        if (p == 1) {
          x(a, b) = cplx(0, 1);
          x(b, a) = cplx(0, -1);
          return x;
        }
        p -= 2;
      }
    }
    return x;
  };

  for (int step = 0; step < 100000; ++step) {
    std::vector<std::size_t> order(atoms.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return atoms[a].l.squaredNorm() < atoms[b].l.squaredNorm();
    });
    std::vector<std::size_t> chosen;
    Eigen::Index dof = 0;
    for (std::size_t k : order) {
      if (dof > equations) break;
      chosen.push_back(k);
      dof += atoms[k].l.cols() * atoms[k].l.cols();
    }
    if (dof <= equations) break;

    Eigen::MatrixXd a(equations, dof);
    Eigen::Index col = 0;
    for (std::size_t k : chosen) {
      const Eigen::Index r = atoms[k].l.cols();
      for (Eigen::Index p = 0; p < r * r; ++p) {
        const ComplexMatrix y = atoms[k].e.cwiseProduct(atoms[k].l * basis(r, p) * atoms[k].l.adjoint());
        flatten(y, a.col(col++));
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd null = svd.matrixV().col(dof - 1);

    std::vector<ComplexMatrix> xs;
    col = 0;
    double most_negative = 0.0, most_positive = 0.0;
    for (std::size_t k : chosen) {
      const Eigen::Index r = atoms[k].l.cols();
      ComplexMatrix x = ComplexMatrix::Zero(r, r);
      for (Eigen::Index p = 0; p < r * r; ++p) x += null(col++) * basis(r, p);
      const auto ev = eigh(HermitianMatrix(x));
      most_negative = std::min(most_negative, ev.values(0));
      most_positive = std::max(most_positive, ev.values(r - 1));
      xs.push_back(std::move(x));
    }
    // Step until the first block loses rank: I + s X_k >= 0 for all k.
    double s;
    if (most_negative < 0.0) {
      s = -1.0 / most_negative;
    } else {
      s = -1.0 / most_positive;
    }
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      Atom& atom = atoms[chosen[c]];
      const Eigen::Index r = atom.l.cols();
      const auto ev = eigh(HermitianMatrix(ComplexMatrix(ComplexMatrix::Identity(r, r) + s * xs[c])));
      const double cap = ev.values(r - 1);
      Eigen::Index keep = 0;
      for (Eigen::Index i = 0; i < r; ++i) {
        if (ev.values(i) > 1e-12 * std::max(1.0, cap)) ++keep;
      }
      ComplexMatrix next(n, keep);
      Eigen::Index out = 0;
      for (Eigen::Index i = r - 1; i >= 0; --i) {
        if (ev.values(i) > 1e-12 * std::max(1.0, cap)) next.col(out++) = atom.l * ev.vectors.col(i) * std::sqrt(ev.values(i));
      }
      atom.l = std::move(next);
    }
    atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.l.cols() == 0; }), atoms.end());
  }

  DecompositionCertificate out;
  out.scale = cert.scale;
  for (const Atom& atom : atoms) {
    out.alphas.push_back(atom.alpha);
    out.blocks.emplace_back(atom.l * atom.l.adjoint());
  }
  out.residual = (decomposition_sum(problem.nodes, out.alphas, out.blocks).matrix() -
                  (cert.scale * cert.scale * ComplexMatrix::Ones(n, n) -
                   problem.target_vector() * problem.target_vector().adjoint()))
                     .norm();
  return out;
}

namespace {

using sdp::Entry;

std::vector<cplx> equispaced_circle(int count) {
  std::vector<cplx> out;
  out.reserve(count);
  for (int m = 0; m < count; ++m) out.push_back(std::polar(1.0, 2.0 * M_PI * m / count));
  return out;
}

// Orthonormal basis of n x n Hermitian matrices under Re tr(U* V), as entry lists.
std::vector<std::vector<Entry>> hermitian_basis(int n) {
  std::vector<std::vector<Entry>> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) basis.push_back({{i, i, 1.0}});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      basis.push_back({{i, j, r}, {j, i, r}});
      basis.push_back({{i, j, cplx(0, r)}, {j, i, cplx(0, -r)}});
    }
  }
  return basis;
}

double basis_inner(const std::vector<Entry>& h, const ComplexMatrix& m) {
  double acc = 0.0;
  for (const Entry& e : h) acc += (std::conj(e.value) * m(e.row, e.col)).real();
  return acc;
}

struct Gauge {
  double tau_primal = 0.0;
  double tau_dual = 0.0;
  std::vector<ComplexMatrix> blocks;  // Gamma_m at the optimum
  ComplexMatrix multiplier;           // extremal kernel K: C_m o K >= 0, sum K = 1
  int iterations = 0;
  sdp::Status status = sdp::Status::Stalled;
};

Gauge solve_gauge(const PickProblem& problem, const std::vector<HermitianMatrix>& coords, const SolverConfig& config) {
  const int n = static_cast<int>(problem.size());
  const int blocks = static_cast<int>(coords.size());
  const ComplexVector w = problem.target_vector();
  const ComplexMatrix ww = w * w.adjoint();
  const ComplexMatrix ones = ComplexMatrix::Ones(n, n);
  const auto basis = hermitian_basis(n);

  sdp::Problem sp;
  for (int m = 0; m < blocks; ++m) {
    sp.block_sizes.push_back(n);
    sp.objective.push_back(ComplexMatrix::Zero(n, n));
  }
  sp.block_sizes.push_back(1);
  sp.objective.push_back(ComplexMatrix::Ones(1, 1));

  for (const auto& h : basis) {
    sdp::Constraint c;
    c.blocks.resize(blocks + 1);
    for (int m = 0; m < blocks; ++m) {
      const ComplexMatrix& e = coords[m].matrix();
      for (const Entry& he : h) c.blocks[m].push_back({he.row, he.col, he.value * std::conj(e(he.row, he.col))});
    }
    const double j_coeff = basis_inner(h, ones);
    if (j_coeff != 0.0) c.blocks[blocks].push_back({0, 0, -j_coeff});
    c.rhs = -basis_inner(h, ww);
    sp.constraints.push_back(std::move(c));
  }

  sdp::Options opts;
  opts.tolerance = config.ipm_tol;
  opts.max_iterations = config.ipm_max_iterations;
  const sdp::Solution sol = sdp::solve(sp, opts);

  Gauge g;
  g.status = sol.status;
  g.iterations = sol.iterations;
  g.tau_primal = sol.x[blocks](0, 0).real();
  g.tau_dual = sol.dual_objective;
  g.blocks.assign(sol.x.begin(), sol.x.begin() + blocks);
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (const Entry& e : basis[k]) y(e.row, e.col) += sol.y(k) * e.value;
  }
  g.multiplier = -y.conjugate();
  return g;
}

// Per-entry projection onto {sum_m E_m o G_m = target}.
void affine_project(std::vector<ComplexMatrix>& g, const std::vector<HermitianMatrix>& coords,
                    const ComplexMatrix& target) {
  const Eigen::Index n = target.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      cplx lhs = 0.0;
      double den = 0.0;
      for (std::size_t m = 0; m < g.size(); ++m) {
        const cplx e = coords[m](i, j);
        lhs += e * g[m](i, j);
        den += std::norm(e);
      }
      const cplx r = target(i, j) - lhs;
      for (std::size_t m = 0; m < g.size(); ++m) {
        g[m](i, j) += std::conj(coords[m](i, j)) * r / den;
        if (i == j) {
          g[m](i, i) = g[m](i, i).real();
        } else {
          g[m](j, i) = std::conj(g[m](i, j));
        }
      }
    }
  }
}

double min_block_eig(const std::vector<ComplexMatrix>& g) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& b : g) out = std::min(out, lambda_min(HermitianMatrix(b)));
  return out;
}

// Dykstra alternating projections between the product PSD cone and the
// affine set, ending on the affine side (exact residual).
void dykstra_polish(std::vector<ComplexMatrix>& g, const std::vector<HermitianMatrix>& coords,
                    const ComplexMatrix& target, double psd_tol, int max_iterations) {
  affine_project(g, coords, target);
  if (min_block_eig(g) >= -psd_tol) return;
  const std::size_t nb = g.size();
  std::vector<ComplexMatrix> p(nb), q(nb);
  for (std::size_t m = 0; m < nb; ++m) {
    p[m] = ComplexMatrix::Zero(g[m].rows(), g[m].cols());
    q[m] = p[m];
  }
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<ComplexMatrix> y(nb);
    for (std::size_t m = 0; m < nb; ++m) {
      y[m] = psd_project(HermitianMatrix(g[m] + p[m])).matrix();
      p[m] = g[m] + p[m] - y[m];
    }
    std::vector<ComplexMatrix> x(nb);
    for (std::size_t m = 0; m < nb; ++m) x[m] = y[m] + q[m];
    affine_project(x, coords, target);
    for (std::size_t m = 0; m < nb; ++m) q[m] = y[m] + q[m] - x[m];
    g = std::move(x);
    if (min_block_eig(g) >= -psd_tol) return;
  }
}

DualCertificate make_dual(const PickProblem& problem, KernelMatrix k, double scale) {
  const auto eig = eigh(pick_matrix(problem, k, scale));
  const double slack = 0.0;
  return DualCertificate{std::move(k), -eig.values(0), eig.vectors.col(0), slack, scale};
}

struct SzegoReference {
  KernelMatrix kernel;
  double slack;
  double gram_min;
};

SzegoReference szego_reference(const NodeSet& nodes, const SolverConfig& config) {
  KernelMatrix ks = normalize_diag(KernelMatrix(nodes, szego_gram(nodes)));
  const AdmissibilityReport r = admissibility_report(ks, config.verify_grid, config.refine_tol, config.threads);
  return {std::move(ks), r.slack(), r.gram_min_eig};
}

struct KernelAttempt {
  std::optional<DualCertificate> certificate;
  double violation = -std::numeric_limits<double>::infinity();
  double raw_slack = 0.0;  // slack before any repair
  cplx worst_alpha = 1.0;
};

// Repairs k towards K_lambda by mixing with the normalized Szego kernel when
// its admissibility slack or strict positivity falls short, then verifies.
KernelAttempt certify_kernel(const PickProblem& problem, const KernelMatrix& candidate, double scale,
                             const SolverConfig& config, const SzegoReference& szego) {
  KernelAttempt attempt;
  const AdmissibilityReport first =
      admissibility_report(candidate, config.verify_grid, config.refine_tol, config.threads);
  attempt.raw_slack = first.slack();
  attempt.worst_alpha = first.worst_alpha;

  KernelMatrix k = candidate;
  double slack = first.slack();
  double gmin = first.gram_min_eig;
  const double slack_target = 0.0;
  const double strict_target = 2.0 * config.strict_tol;
  if (slack < slack_target || gmin < strict_target) {
    double theta = 0.0;
    if (slack < slack_target && szego.slack > slack) {
      theta = std::max(theta, (slack_target - slack) / (szego.slack - slack));
    }
    if (gmin < strict_target && szego.gram_min > gmin) {
      theta = std::max(theta, (strict_target - gmin) / (szego.gram_min - gmin));
    }
    theta = std::min(1.0, theta * 1.05 + 1e-12);
    for (int tries = 0; tries < 6; ++tries) {
      k = KernelMatrix(problem.nodes, HermitianMatrix((1.0 - theta) * candidate.gram.matrix() +
                                                      theta * szego.kernel.gram.matrix()));
      k = normalize_diag(k);
      const AdmissibilityReport r = admissibility_report(k, config.verify_grid, config.refine_tol, config.threads);
      slack = r.slack();
      gmin = r.gram_min_eig;
      if (slack >= -config.admissibility_tol && gmin >= config.strict_tol) break;
      theta = std::min(1.0, 2.0 * theta);
    }
  }
  DualCertificate cert = make_dual(problem, std::move(k), scale);
  attempt.violation = cert.violation;
  const DualCheck check = verify_dual(problem, cert, config.verify_grid, config.refine_tol);
  cert.admissibility_slack = check.admissibility_slack;
  if (check.ok(config.dual_tol, config.admissibility_tol, config.strict_tol)) attempt.certificate = std::move(cert);
  return attempt;
}

ComplexMatrix unit_diagonal(ComplexMatrix k) {
  for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, i) = 1.0;
  return k;
}

std::optional<DualCertificate> dual_search_impl(const PickProblem& problem, double scale, const SolverConfig& config,
                                                std::uint64_t seed, const std::optional<KernelMatrix>& warm_start,
                                                const SzegoReference& szego) {
  const NodeSet& nodes = problem.nodes;
  const Eigen::Index n = nodes.size();
  const ComplexVector w = problem.target_vector();
  const ComplexMatrix pick_base = scale * scale * ComplexMatrix::Ones(n, n) - w * w.adjoint();
  std::vector<ComplexMatrix> coords;
  for (const cplx& a : equispaced_circle(config.dual_grid)) coords.push_back(coordinate_matrix(a, nodes).matrix());

  std::vector<KernelMatrix> starts;
  if (warm_start) starts.push_back(*warm_start);
  starts.push_back(szego.kernel);
  starts.push_back(random_admissible(nodes, seed, 2));

  std::optional<DualCertificate> best;
  for (const KernelMatrix& start : starts) {
    // The starting point itself may already be a certificate.
    KernelAttempt initial = certify_kernel(problem, start, scale, config, szego);
    if (initial.certificate && (!best || initial.certificate->violation > best->violation)) {
      best = std::move(initial.certificate);
      continue;
    }
    ComplexMatrix k = start.gram.matrix();
    double weight = 10.0;
    double step = 0.05;
    for (int it = 0; it < config.dual_iterations; ++it) {
      const auto pe = eigh(HermitianMatrix(pick_base.cwiseProduct(k)));
      const ComplexVector x = pe.vectors.col(0);
      ComplexMatrix dir = -(x * x.adjoint()).cwiseProduct(pick_base.conjugate());
      for (const ComplexMatrix& c : coords) {
        const auto ce = eigh(HermitianMatrix(c.cwiseProduct(k)));
        for (Eigen::Index r = 0; r < n && ce.values(r) < 0.0; ++r) {
          const ComplexVector u = ce.vectors.col(r);
          dir -= weight * ce.values(r) * (u * u.adjoint()).cwiseProduct(c.conjugate());
        }
      }
      const double norm = dir.norm();
      if (norm < 1e-14) break;
      k += (step / norm) * dir;
      for (int pass = 0; pass < 3; ++pass) k = psd_project(HermitianMatrix(unit_diagonal(k))).matrix();
      k = unit_diagonal(k);
      weight *= 1.03;
      step *= 0.995;
    }
    KernelAttempt attempt = certify_kernel(problem, KernelMatrix(nodes, HermitianMatrix(k)), scale, config, szego);
    if (attempt.certificate && (!best || attempt.certificate->violation > best->violation)) {
      best = std::move(attempt.certificate);
    }
  }
  return best;
}

}  // namespace

std::optional<DualCertificate> dual_search(const PickProblem& problem, double scale, const SolverConfig& config,
                                           std::uint64_t seed, const std::optional<KernelMatrix>& warm_start) {
  return dual_search_impl(problem, scale, config, seed, warm_start, szego_reference(problem.nodes, config));
}

std::optional<DualCertificate> dual_search(const PickProblem& problem, double scale, const SolverConfig& config,
                                           std::uint64_t seed) {
  return dual_search(problem, scale, config, seed, std::nullopt);
}

struct FeasibilitySolver::State {
  PickProblem problem;
  SolverConfig config;
  std::vector<cplx> support;
  std::vector<cplx> exchange_points;
  std::vector<HermitianMatrix> coords;
  std::vector<HermitianMatrix> b_grams;
  std::optional<Gauge> gauge;
  std::optional<SzegoReference> szego;
  bool refined = false;
  int iterations = 0;

  State(const PickProblem& p, const SolverConfig& c) : problem(p), config(c) {
    set_support(equispaced_circle(config.alpha_grid));
  }

  void set_support(std::vector<cplx> alphas) {
    support = std::move(alphas);
    coords.clear();
    b_grams.clear();
    for (const cplx& a : support) {
      coords.push_back(coordinate_matrix(a, problem.nodes));
      b_grams.push_back(b_alpha_gram(a, problem.nodes));
    }
    gauge.reset();
  }

  const Gauge& current_gauge() {
    if (!gauge) {
      gauge = solve_gauge(problem, coords, config);
      iterations += gauge->iterations;
    }
    return *gauge;
  }

  const SzegoReference& szego_ref() {
    if (!szego) szego = szego_reference(problem.nodes, config);
    return *szego;
  }

  bool add_exchange_point(cplx alpha) {
    for (const cplx& a : support) {
      if (std::abs(a - alpha) < 1e-9) return false;
    }
    exchange_points.push_back(alpha);
    std::vector<cplx> next = support;
    next.push_back(alpha);
    set_support(std::move(next));
    return true;
  }

  // Primal certificate at level t: Gamma* plus (t^2 - tau) B_{alpha_m0} on its
  // heaviest block (E_m o B_m = J), polished and then compressed.
  std::optional<DecompositionCertificate> build_primal(double t, const std::vector<ComplexMatrix>& base,
                                                       double tau) {
    const Eigen::Index n = problem.size();
    const ComplexVector w = problem.target_vector();
    const ComplexMatrix target = t * t * ComplexMatrix::Ones(n, n) - w * w.adjoint();
    std::vector<ComplexMatrix> g(support.size());
    std::size_t heaviest = 0;
    for (std::size_t m = 0; m < support.size(); ++m) {
      g[m] = base.empty() ? ComplexMatrix::Zero(n, n) : base[m];
      if (g[m].trace().real() > g[heaviest].trace().real()) heaviest = m;
    }
    g[heaviest] += (t * t - tau) * b_grams[heaviest].matrix();

    return polish_and_check(t, std::move(g), coords, support, target);
  }

  std::optional<DecompositionCertificate> polish_and_check(double t, std::vector<ComplexMatrix> g,
                                                           const std::vector<HermitianMatrix>& block_coords,
                                                           std::vector<cplx> alphas, const ComplexMatrix& target) {
    dykstra_polish(g, block_coords, target, config.block_psd_tol, 500);
    DecompositionCertificate cert;
    cert.alphas = std::move(alphas);
    for (auto& b : g) cert.blocks.emplace_back(b);
    cert.scale = t;
    const PrimalCheck check = verify_primal(problem, cert);
    cert.residual = check.residual;
    if (!check.ok(config.primal_tol, config.block_psd_tol)) return std::nullopt;
    DecompositionCertificate small = compress_certificate(problem, cert);
    std::vector<ComplexMatrix> sg;
    std::vector<HermitianMatrix> sc;
    for (std::size_t m = 0; m < small.blocks.size(); ++m) {
      sg.push_back(small.blocks[m].matrix());
      sc.push_back(coordinate_matrix(small.alphas[m], problem.nodes));
    }
    if (!sg.empty()) {
      dykstra_polish(sg, sc, target, config.block_psd_tol, 500);
      small.blocks.clear();
      for (auto& b : sg) small.blocks.emplace_back(b);
      const PrimalCheck small_check = verify_primal(problem, small);
      small.residual = small_check.residual;
      if (small_check.ok(config.primal_tol, config.block_psd_tol)) return small;
    }
    return cert;
  }

  FeasibilityVerdict decide(double t) {
    if (!(t > 0.0)) throw DomainError("solve_feasibility: scale must be positive");
    const auto started = std::chrono::steady_clock::now();
    const int iterations_before = iterations;
    FeasibilityVerdict verdict;
    auto finish = [&](FeasibilityVerdict v) {
      v.iterations = iterations - iterations_before;
      v.wall_time = std::chrono::steady_clock::now() - started;
      return v;
    };

    if (problem.max_abs_target() == 0.0) {
      verdict.feasible = true;
      verdict.primal = build_primal(t, {}, 0.0);
      if (verdict.primal) return finish(std::move(verdict));
    }

    double best_violation = -std::numeric_limits<double>::infinity();
    double last_gap = 0.0;
    for (int phase = 0; phase < 2; ++phase) {
      std::optional<KernelMatrix> warm;
      for (int round = 0; round <= config.exchange_rounds; ++round) {
        const Gauge& g = current_gauge();
        last_gap = t * t - g.tau_primal;
        if (t * t >= g.tau_primal) {
          if (auto cert = build_primal(t, g.blocks, g.tau_primal)) {
            verdict.feasible = true;
            verdict.primal = std::move(cert);
            return finish(std::move(verdict));
          }
        }
        warm.reset();
        bool positive_diag = true;
        for (Eigen::Index i = 0; i < g.multiplier.rows(); ++i) positive_diag &= g.multiplier(i, i).real() > 0.0;
        if (!positive_diag) break;
        warm = normalize_diag(KernelMatrix(problem.nodes, HermitianMatrix(g.multiplier)));
        KernelAttempt attempt = certify_kernel(problem, *warm, t, config, szego_ref());
        best_violation = std::max(best_violation, attempt.violation);
        if (attempt.certificate) {
          verdict.feasible = false;
          verdict.dual = std::move(attempt.certificate);
          return finish(std::move(verdict));
        }
        // The multiplier is admissible only on the support; add the worst alpha.
        if (attempt.raw_slack >= -config.admissibility_tol || round == config.exchange_rounds) break;
        if (!add_exchange_point(attempt.worst_alpha)) break;
      }

      if (auto cert = dual_search_impl(problem, t, config, config.seed, warm, szego_ref())) {
        verdict.feasible = false;
        verdict.dual = std::move(cert);
        return finish(std::move(verdict));
      }

      const Gauge& g = current_gauge();
      const double level = std::sqrt(std::max(g.tau_primal, 0.0));
      if (level <= t * (1.0 + config.rho_tol)) {
        const double lifted = std::max(t, level * (1.0 + 1e-9));
        if (auto cert = build_primal(lifted, g.blocks, g.tau_primal)) {
          verdict.feasible = true;
          verdict.tie_warning = true;
          verdict.primal = std::move(cert);
          return finish(std::move(verdict));
        }
      }

      if (phase == 0 && !refined) {
        refined = true;
        std::vector<cplx> next = equispaced_circle(4 * config.alpha_grid);
        next.insert(next.end(), exchange_points.begin(), exchange_points.end());
        set_support(std::move(next));
      } else {
        break;
      }
    }
    throw UndecidedError("solve_feasibility: no certificate at scale " + std::to_string(t), last_gap,
                         best_violation);
  }
};

FeasibilitySolver::FeasibilitySolver(const PickProblem& problem, const SolverConfig& config)
    : state_(std::make_unique<State>(problem, config)) {}
FeasibilitySolver::~FeasibilitySolver() = default;
FeasibilitySolver::FeasibilitySolver(FeasibilitySolver&&) noexcept = default;
FeasibilitySolver& FeasibilitySolver::operator=(FeasibilitySolver&&) noexcept = default;

FeasibilityVerdict FeasibilitySolver::decide(double scale) { return state_->decide(scale); }
double FeasibilitySolver::gauge_value() { return state_->current_gauge().tau_primal; }
const std::vector<cplx>& FeasibilitySolver::support() const { return state_->support; }

FeasibilityVerdict solve_feasibility(const PickProblem& problem, double scale, const SolverConfig& config) {
  FeasibilitySolver solver(problem, config);
  return solver.decide(scale);
}

ExtremalNormResult extremal_norm(const PickProblem& problem, const SolverConfig& config) {
  ExtremalNormResult result;
  const double wmax = problem.max_abs_target();
  if (wmax == 0.0) {
    // Zero data: the zero function, certified by all-zero blocks at level 0.
    result.certificate_at_rho_plus.alphas = equispaced_circle(config.alpha_grid);
    result.certificate_at_rho_plus.blocks.assign(config.alpha_grid, HermitianMatrix(problem.size()));
    result.certificate_at_rho = result.certificate_at_rho_plus;
    return result;
  }

  FeasibilitySolver solver(problem, config);
  double lo = wmax;
  double hi = 2.0 * wmax;
  int doublings = 0;
  bool bracketed = false;
  // Constant-like data: rho sits at the trivial lower bound.
  if (std::sqrt(std::max(solver.gauge_value(), 0.0)) <= wmax * (1.0 + config.rho_tol)) {
    FeasibilityVerdict v = solver.decide(wmax);
    ++result.probes;
    if (v.feasible) {
      hi = v.primal->scale;
      result.tie_warning |= v.tie_warning;
      result.certificate_at_rho = std::move(*v.primal);
      bracketed = true;
    }
  }
  while (!bracketed) {
    FeasibilityVerdict v = solver.decide(hi);
    ++result.probes;
    if (v.feasible) {
      hi = v.primal->scale;
      result.tie_warning |= v.tie_warning;
      result.certificate_at_rho = std::move(*v.primal);
      break;
    }
    lo = hi;
    result.certificate_at_lo = std::move(v.dual);
    hi *= 2.0;
    if (++doublings > 60) throw ConvergenceError("extremal_norm: no feasible level after 60 doublings", hi);
  }
  while (hi - lo > config.rho_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityVerdict v = solver.decide(mid);
    ++result.probes;
    if (v.feasible) {
      hi = v.primal->scale;
      result.certificate_at_rho = std::move(*v.primal);
      if (v.tie_warning) {
        result.tie_warning = true;
        if (mid > lo) {
          lo = mid;
          result.certificate_at_lo.reset();
        }
      }
    } else {
      lo = mid;
      result.certificate_at_lo = std::move(v.dual);
    }
  }
  // A tie can leave the lower end uncertified; look for a dual certificate just below.
  if (!result.certificate_at_lo && lo > wmax) {
    for (double k : {2.0, 4.0, 8.0}) {
      const double level = hi * (1.0 - k * config.rho_tol);
      if (level <= wmax) break;
      try {
        FeasibilityVerdict v = solver.decide(level);
        ++result.probes;
        if (!v.feasible) {
          lo = level;
          result.certificate_at_lo = std::move(v.dual);
          break;
        }
      } catch (const UndecidedError&) {
      }
    }
  }
  result.rho = hi;
  result.bracket_lo = lo;
  result.bracket_hi = hi;

  const double eps = 10.0 * config.rho_tol;
  FeasibilityVerdict plus = solver.decide(hi * (1.0 + eps));
  if (!plus.feasible) throw UndecidedError("extremal_norm: level above rho reported infeasible", 0.0, 0.0);
  result.certificate_at_rho_plus = std::move(*plus.primal);
  try {
    FeasibilityVerdict minus = solver.decide(hi * (1.0 - eps));
    if (!minus.feasible) result.extremal_kernel = std::move(minus.dual);
  } catch (const UndecidedError&) {
    // The dual side is optional.
  }
  return result;
}

}  // namespace gamma_pick
