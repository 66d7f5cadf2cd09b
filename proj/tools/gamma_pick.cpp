// gamma-pick: command-line front end.
//
// Exit codes: 0 yes / feasible / passed, 3 no / infeasible / failed,
// 4 undecided, 2 usage or I/O error.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/extension.hpp"
#include "gamma_pick/geometry.hpp"
#include "gamma_pick/hardy.hpp"
#include "gamma_pick/io.hpp"
#include "gamma_pick/pick.hpp"
#include "gamma_pick/realization.hpp"
#include "gamma_pick/verify.hpp"

namespace fs = std::filesystem;
using namespace gamma_pick;
using io::Json;

namespace {

constexpr int kYes = 0;
constexpr int kUsage = 2;
constexpr int kNo = 3;
constexpr int kUndecided = 4;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  int alpha_grid = 64;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::string out = ".";
  unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--alpha-grid", c.alpha_grid, "size of the boundary alpha grid")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "relative width of the norm bracket")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads (default: GAMMA_PICK_THREADS or all cores)");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAMMA_PICK_THREADS")) {
    unsigned v = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (res.ec == std::errc() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SolverConfig make_config(const Common& c) {
  SolverConfig config;
  config.alpha_grid = c.alpha_grid;
  config.rho_tol = c.tol;
  config.seed = c.seed;
  config.threads = resolve_threads(c.threads);
  return config;
}

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    double v = 0.0;
    const auto res = std::from_chars(text.data() + pos, text.data() + end, v);
    if (res.ec != std::errc() || res.ptr != text.data() + end) throw UsageError(flag + ": cannot parse \"" + text + "\"");
    out.push_back(v);
    pos = end + 1;
  }
  if (out.size() != count) {
    throw UsageError(flag + ": expected " + std::to_string(count) + " comma-separated numbers");
  }
  return out;
}

cplx parse_complex(const std::string& text, const std::string& flag) {
  const auto v = parse_numbers(text, 2, flag);
  return {v[0], v[1]};
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

class Manifest {
 public:
  Manifest(std::string command, const SolverConfig& config, fs::path out)
      : command_(std::move(command)), config_(config), out_(std::move(out)) {}

  void input(const fs::path& path) {
    inputs_.push_back(path.string());
    digest_source_ += io::read_text(path);
  }

  void phase(const std::string& name, std::chrono::duration<double> d) { timings_[name] = d.count(); }

  void write(const std::string& name, const Json& j) {
    io::write_json(out_ / name, j);
    outputs_.push_back(name);
  }

  void record(const std::string& name) { outputs_.push_back(name); }

  void finish() {
    Json m{{"command", command_},
           {"config", io::to_json(config_)},
           {"seed", config_.seed},
           {"threads", config_.threads},
           {"inputs", inputs_},
           {"input_digest", "sha256:" + sha256_hex(digest_source_)},
           {"outputs", outputs_},
           {"timings", timings_}};
    io::write_json(out_ / "manifest.json", m);
  }

 private:
  std::string command_;
  SolverConfig config_;
  fs::path out_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::string digest_source_;
  Json timings_ = Json::object();
};

template <typename F>
auto timed(Manifest& manifest, const std::string& name, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto result = fn();
  manifest.phase(name, std::chrono::steady_clock::now() - start);
  return result;
}

void print(const Json& j) { std::cout << io::dump(j); }

Json undecided_json(const UndecidedError& e) {
  return Json{{"undecided", true},
              {"message", e.what()},
              {"primal_gap", e.primal_gap()},
              {"dual_violation", std::isfinite(e.dual_violation()) ? Json(e.dual_violation()) : Json()}};
}

// ---- member ----

int cmd_member(const std::string& s_text, const std::string& p_text) {
  const cplx s = parse_complex(s_text, "--s");
  const cplx p = parse_complex(p_text, "--p");
  const Membership m = is_member(s, p);
  Json out{{"member", m.member}, {"margin", m.margin ? Json(*m.margin) : Json()}};
  if (m.sup) {
    out["sup_phi"] = m.sup->sup;
    out["witness_alpha"] = io::to_json(m.sup->witness_alpha);
  } else {
    out["sup_phi"] = Json();
    out["witness_alpha"] = Json();
  }
  print(out);
  return m.member ? kYes : kNo;
}

// ---- pick ----

int cmd_pick_solve(const std::string& problem_path, double scale, const Common& common) {
  const SolverConfig config = make_config(common);
  Manifest manifest("pick solve", config, common.out);
  manifest.input(problem_path);
  const PickProblem problem = io::problem_from_json(io::read_json(problem_path));
  FeasibilitySolver solver(problem, config);
  try {
    const FeasibilityVerdict v = timed(manifest, "solve", [&] { return solver.decide(scale); });
    Json verdict = io::to_json(v);
    verdict["requested_scale"] = scale;
    if (v.primal) {
      manifest.write("primal.json", io::to_json(*v.primal));
      verdict["certificate_file"] = "primal.json";
    }
    if (v.dual) {
      manifest.write("dual.json", io::to_json(*v.dual));
      verdict["certificate_file"] = "dual.json";
    }
    manifest.write("verdict.json", verdict);
    manifest.finish();
    print(verdict);
    return v.feasible ? kYes : kNo;
  } catch (const UndecidedError& e) {
    Json verdict = undecided_json(e);
    verdict["requested_scale"] = scale;
    manifest.write("verdict.json", verdict);
    manifest.finish();
    print(verdict);
    return kUndecided;
  }
}

int cmd_pick_norm(const std::string& problem_path, const Common& common) {
  const SolverConfig config = make_config(common);
  Manifest manifest("pick norm", config, common.out);
  manifest.input(problem_path);
  const PickProblem problem = io::problem_from_json(io::read_json(problem_path));
  try {
    const ExtremalNormResult r = timed(manifest, "extremal_norm", [&] { return extremal_norm(problem, config); });
    Json out{{"rho", r.rho},
             {"bracket_lo", r.bracket_lo},
             {"bracket_hi", r.bracket_hi},
             {"probes", r.probes},
             {"tie_warning", r.tie_warning}};
    manifest.write("primal.json", io::to_json(r.certificate_at_rho_plus));
    out["primal_file"] = "primal.json";
    out["primal_scale"] = r.certificate_at_rho_plus.scale;
    if (r.extremal_kernel) {
      manifest.write("dual.json", io::to_json(*r.extremal_kernel));
      out["dual_file"] = "dual.json";
      out["dual_scale"] = r.extremal_kernel->scale;
    }
    manifest.write("norm.json", out);
    manifest.finish();
    print(out);
    return kYes;
  } catch (const UndecidedError& e) {
    const Json out = undecided_json(e);
    manifest.write("norm.json", out);
    manifest.finish();
    print(out);
    return kUndecided;
  }
}

// ---- realize ----

struct RealizeArgs {
  std::string cert;
  std::string problem;
  std::string eval;
  int grid = 0;
  std::string csv;
};

RealizedFunction load_realization(const std::string& cert_path, const std::string& problem_path) {
  const PickProblem problem = io::problem_from_json(io::read_json(problem_path));
  const DecompositionCertificate cert = io::primal_from_json(io::read_json(cert_path));
  for (const auto& b : cert.blocks) {
    if (b.dim() != static_cast<Eigen::Index>(problem.size())) {
      throw MismatchError("certificate blocks do not match the problem size");
    }
  }
  const PrimalCheck check = verify_primal(problem, cert);
  if (!check.ok(1e-6, 1e-9)) {
    throw MismatchError("certificate does not certify this problem (residual " + std::to_string(check.residual) +
                        ", min block eigenvalue " + std::to_string(check.min_block_eig) + ")");
  }
  return RealizedFunction{build_colligation(problem, cert), std::nullopt};
}

int cmd_realize(const RealizeArgs& args, const Common& common) {
  const RealizedFunction fn = load_realization(args.cert, args.problem);
  if (!args.eval.empty()) {
    const auto v = parse_numbers(args.eval, 4, "--eval");
    const GPoint x = GPoint::make({v[0], v[1]}, {v[2], v[3]});
    const cplx f = evaluate_scaled(fn, x);
    print(Json{{"value", io::to_json(f)}, {"abs", std::abs(f)}});
    return kYes;
  }
  if (args.grid > 0) {
    if (args.csv.empty()) throw UsageError("--grid requires --csv");
    const io::GridDump d = io::write_grid_csv(args.csv, fn, args.grid);
    print(Json{{"csv", args.csv},
               {"rows", d.rows},
               {"observed_sup", d.observed_sup},
               {"observed_sup_unit", d.observed_sup_unit}});
    return kYes;
  }
  const SolverConfig config = make_config(common);
  Manifest manifest("realize", config, common.out);
  manifest.input(args.cert);
  manifest.input(args.problem);
  const Json col = io::to_json(fn.colligation);
  manifest.write("colligation.json", col);
  manifest.finish();
  print(col);
  return kYes;
}

// ---- extend / audit / hardy / verify ----

int cmd_extend(const std::string& problem_path, const Common& common) {
  const SolverConfig config = make_config(common);
  Manifest manifest("extend", config, common.out);
  manifest.input(problem_path);
  const PickProblem problem = io::problem_from_json(io::read_json(problem_path));
  try {
    const ExtensionResult r = timed(manifest, "extend", [&] { return extend(problem.nodes, problem.targets, config); });
    manifest.write("extension.json", io::to_json(r));
    manifest.finish();
    Json summary{{"rho", r.rho}, {"max_ratio", r.audit.max_ratio}};
    if (r.interpolant.norm_audit) {
      summary["norm_audit"] = r.interpolant.norm_audit->observed_sup * r.interpolant.colligation.scale;
    }
    if (r.audit.extremal_ratio) summary["extremal_ratio"] = *r.audit.extremal_ratio;
    summary["file"] = "extension.json";
    print(summary);
    return kYes;
  } catch (const UndecidedError& e) {
    print(undecided_json(e));
    return kUndecided;
  }
}

int cmd_audit(const std::string& result_path, int trials, const Common& common) {
  if (trials < 1) throw UsageError("--trials must be at least 1");
  const SolverConfig config = make_config(common);
  Manifest manifest("audit vonneumann", config, common.out);
  manifest.input(result_path);
  const io::StoredExtension stored = io::extension_from_json(io::read_json(result_path));
  const VonNeumannAudit audit = timed(manifest, "audit", [&] {
    return von_neumann_audit(stored.problem, stored.rho, stored.extremal_kernel, trials, config.seed, config.threads);
  });
  Json out = io::to_json(audit);
  out["rho"] = stored.rho;
  out["passed"] = audit.max_ratio <= 1.0 + 1e-6;
  manifest.write("audit.json", out);
  manifest.finish();
  out.erase("worst_delta");
  print(out);
  return audit.max_ratio <= 1.0 + 1e-6 ? kYes : kNo;
}

int cmd_hardy(int samples, int node_sets, int max_n, const Common& common) {
  const SolverConfig config = make_config(common);
  Manifest manifest("hardy check", config, common.out);
  HardyCheckReport report = timed(manifest, "identity", [&] {
    return kernel_identity_check(samples, config.seed, config.threads);
  });
  const HardyCheckReport adm = timed(manifest, "admissibility", [&] {
    return szego_admissibility_check(node_sets, max_n, config.seed, 256, config.threads);
  });
  report.admissibility_min_eig = adm.admissibility_min_eig;
  report.gram_min_eig = adm.gram_min_eig;
  report.node_set_sizes = adm.node_set_sizes;
  const Json out = io::to_json(report);
  manifest.write("hardy.json", out);
  manifest.finish();
  print(out);
  return report.ok() ? kYes : kNo;
}

int cmd_verify(const std::string& cert_path, const std::string& problem_path, const Common& common) {
  const PickProblem problem = io::problem_from_json(io::read_json(problem_path));
  const Json j = io::read_json(cert_path);
  if (!j.is_object() || !j.contains("type")) throw io::FormatError("certificate has no \"type\" field");
  if (j.at("type") == "primal") {
    const DecompositionCertificate cert = io::primal_from_json(j);
    if (cert.blocks.empty() || cert.blocks.front().dim() != static_cast<Eigen::Index>(problem.size())) {
      throw MismatchError("certificate blocks do not match the problem size");
    }
    const PrimalCheck c = verify_primal(problem, cert);
    const bool ok = c.ok(1e-6, 1e-9);
    print(Json{{"type", "primal"},
               {"residual", c.residual},
               {"min_block_eig", c.min_block_eig},
               {"unit_alphas", c.unit_alphas},
               {"ok", ok}});
    return ok ? kYes : kNo;
  }
  const DualCertificate cert = io::dual_from_json(j);
  const DualCheck c = verify_dual(problem, cert, make_config(common).verify_grid);
  const bool ok = c.ok(1e-6, 1e-8, 1e-10);
  print(Json{{"type", "dual"},
             {"violation", c.violation},
             {"admissibility_slack", c.admissibility_slack},
             {"gram_min_eig", c.gram_min_eig},
             {"diag_deviation", c.diag_deviation},
             {"ok", ok}});
  return ok ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nevanlinna-Pick interpolation on the symmetrized bidisk"};
  app.require_subcommand(1);
  Common common;

  std::string s_text, p_text;
  auto* member = app.add_subcommand("member", "membership of (s, p) in G");
  member->add_option("--s", s_text, "s as re,im")->required();
  member->add_option("--p", p_text, "p as re,im")->required();

  auto* pick = app.add_subcommand("pick", "interpolation problems");
  pick->require_subcommand(1);
  std::string problem_path;
  double scale = 1.0;
  auto* solve = pick->add_subcommand("solve", "decide solvability at a norm level");
  solve->add_option("problem", problem_path, "problem JSON")->required();
  solve->add_option("--scale", scale, "norm level t")->check(CLI::PositiveNumber);
  add_common(solve, common);
  auto* norm = pick->add_subcommand("norm", "extremal norm with bracketing certificates");
  norm->add_option("problem", problem_path, "problem JSON")->required();
  add_common(norm, common);

  RealizeArgs realize_args;
  auto* realize_cmd = app.add_subcommand("realize", "realize the interpolant of a primal certificate");
  realize_cmd->add_option("certificate", realize_args.cert, "primal certificate JSON")->required();
  realize_cmd->add_option("--problem", realize_args.problem, "problem JSON")->required();
  auto* eval_opt = realize_cmd->add_option("--eval", realize_args.eval, "evaluate at s_re,s_im,p_re,p_im");
  auto* grid_opt = realize_cmd->add_option("--grid", realize_args.grid, "lattice size for the CSV dump")
                       ->check(CLI::PositiveNumber);
  realize_cmd->add_option("--csv", realize_args.csv, "CSV output path");
  eval_opt->excludes(grid_opt);
  add_common(realize_cmd, common);

  auto* extend_cmd = app.add_subcommand("extend", "extremal extension of node data");
  extend_cmd->add_option("problem", problem_path, "problem JSON")->required();
  add_common(extend_cmd, common);

  std::string result_path;
  int trials = 100;
  auto* audit = app.add_subcommand("audit", "audits");
  audit->require_subcommand(1);
  auto* vonneumann = audit->add_subcommand("vonneumann", "von Neumann inequality over random subordinate pairs");
  vonneumann->add_option("result", result_path, "extension result JSON")->required();
  vonneumann->add_option("--trials", trials, "number of random kernels");
  add_common(vonneumann, common);

  int samples = 10000, node_sets = 100, max_n = 5;
  auto* hardy = app.add_subcommand("hardy", "Hardy space kernel checks");
  hardy->require_subcommand(1);
  auto* check = hardy->add_subcommand("check", "kernel identity and Szego admissibility sweeps");
  check->add_option("--samples", samples, "identity samples")->check(CLI::PositiveNumber);
  check->add_option("--node-sets", node_sets, "random node sets")->check(CLI::PositiveNumber);
  check->add_option("--max-n", max_n, "largest node set")->check(CLI::PositiveNumber);
  add_common(check, common);

  std::string cert_path;
  auto* verify = app.add_subcommand("verify", "re-verify a certificate against a problem");
  verify->add_option("certificate", cert_path, "certificate JSON")->required();
  verify->add_option("--problem", problem_path, "problem JSON")->required();
  add_common(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*member) return cmd_member(s_text, p_text);
    if (*solve) return cmd_pick_solve(problem_path, scale, common);
    if (*norm) return cmd_pick_norm(problem_path, common);
    if (*realize_cmd) return cmd_realize(realize_args, common);
    if (*extend_cmd) return cmd_extend(problem_path, common);
    if (*vonneumann) return cmd_audit(result_path, trials, common);
    if (*check) return cmd_hardy(samples, node_sets, max_n, common);
    if (*verify) return cmd_verify(cert_path, problem_path, common);
  } catch (const UndecidedError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return kUndecided;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
