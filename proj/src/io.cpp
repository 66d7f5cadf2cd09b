#include "gamma_pick/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace gamma_pick::io {

namespace {

std::string number_text(double v) {
  if (!std::isfinite(v)) throw FormatError("dump: non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

bool is_flat(const Json& j) {
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

void dump_into(std::string& out, const Json& j, int indent) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump_into(out, value, indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_flat(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_into(out, j[i], indent + 2);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += number_text(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string("expected a number for ") + what);
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::vector<cplx> complex_list(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of complex numbers");
  std::vector<cplx> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(out, j, 0);
  out += "\n";
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_atomic(path, dump(j)); }

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const GPoint& x) { return Json::array({x.s().real(), x.s().imag(), x.p().real(), x.p().imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const NodeSet& nodes) {
  Json out = Json::array();
  for (const GPoint& x : nodes) out.push_back(to_json(x));
  return out;
}

Json to_json(const KernelMatrix& k) { return Json{{"nodes", to_json(k.nodes)}, {"gram", to_json(k.gram.matrix())}}; }

Json to_json(const PickProblem& problem) {
  Json targets = Json::array();
  for (const cplx& w : problem.targets) targets.push_back(to_json(w));
  return Json{{"nodes", to_json(problem.nodes)}, {"targets", std::move(targets)}};
}

Json to_json(const SolverConfig& c) {
  return Json{{"alpha_grid", c.alpha_grid},
              {"primal_tol", c.primal_tol},
              {"dual_tol", c.dual_tol},
              {"rho_tol", c.rho_tol},
              {"ipm_tol", c.ipm_tol},
              {"ipm_max_iterations", c.ipm_max_iterations},
              {"dual_iterations", c.dual_iterations},
              {"dual_grid", c.dual_grid},
              {"verify_grid", c.verify_grid},
              {"refine_tol", c.refine_tol},
              {"strict_tol", c.strict_tol},
              {"admissibility_tol", c.admissibility_tol},
              {"block_psd_tol", c.block_psd_tol},
              {"exchange_rounds", c.exchange_rounds},
              {"seed", c.seed}};
}

Json to_json(const DecompositionCertificate& cert) {
  Json alphas = Json::array();
  for (const cplx& a : cert.alphas) alphas.push_back(to_json(a));
  Json blocks = Json::array();
  for (const auto& b : cert.blocks) blocks.push_back(to_json(b.matrix()));
  return Json{{"type", "primal"},
              {"scale", cert.scale},
              {"residual", cert.residual},
              {"alphas", std::move(alphas)},
              {"blocks", std::move(blocks)}};
}

Json to_json(const DualCertificate& cert) {
  return Json{{"type", "dual"},
              {"scale", cert.scale},
              {"violation", cert.violation},
              {"admissibility_slack", cert.admissibility_slack},
              {"witness", vector_to_json(cert.witness)},
              {"kernel", to_json(cert.kernel)}};
}

Json to_json(const FeasibilityVerdict& v) {
  Json out{{"feasible", v.feasible}, {"tie_warning", v.tie_warning}, {"iterations", v.iterations}};
  if (v.primal) {
    out["certificate"] = "primal";
    out["scale"] = v.primal->scale;
    out["residual"] = v.primal->residual;
  }
  if (v.dual) {
    out["certificate"] = "dual";
    out["scale"] = v.dual->scale;
    out["violation"] = v.dual->violation;
  }
  return out;
}

Json to_json(const Colligation& c) {
  Json alphas = Json::array();
  for (const cplx& a : c.alphas) alphas.push_back(to_json(a));
  return Json{{"alphas", std::move(alphas)},
              {"block_dims", c.block_dims},
              {"A", to_json(c.A)},
              {"B", to_json(c.B)},
              {"C", to_json(c.C)},
              {"D", to_json(c.D)},
              {"scale", c.scale},
              {"isometry_defect", c.isometry_defect}};
}

Json to_json(const VonNeumannAudit& a) {
  Json out{{"trials", a.trials}, {"max_ratio", a.max_ratio}, {"max_contraction_norm", a.max_contraction_norm}};
  if (a.extremal_ratio) out["extremal_ratio"] = *a.extremal_ratio;
  if (a.worst_delta) out["worst_delta"] = to_json(*a.worst_delta);
  return out;
}

Json to_json(const ExtensionResult& r) {
  Json out{{"problem", to_json(r.problem)},
           {"rho", r.rho},
           {"bracket_lo", r.bracket_lo},
           {"colligation", to_json(r.interpolant.colligation)}};
  if (r.interpolant.norm_audit) {
    out["norm_audit"] = Json{{"samples", r.interpolant.norm_audit->samples},
                             {"observed_sup", r.interpolant.norm_audit->observed_sup * r.interpolant.colligation.scale}};
  }
  out["audit"] = to_json(r.audit);
  if (r.extremal_kernel) out["extremal_kernel"] = to_json(*r.extremal_kernel);
  return out;
}

Json to_json(const HardyCheckReport& r) {
  return Json{{"samples", r.samples},
              {"max_identity_error", r.max_identity_error},
              {"admissibility_min_eig", r.admissibility_min_eig},
              {"gram_min_eig", r.gram_min_eig},
              {"node_set_sizes", r.node_set_sizes},
              {"ok", r.ok()}};
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw FormatError("expected a complex number [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

GPoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("expected a point [s_re, s_im, p_re, p_im]");
  return GPoint::make({number(j[0], "s_re"), number(j[1], "s_im")}, {number(j[2], "p_re"), number(j[3], "p_im")});
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected a matrix");
  const Eigen::Index rows = j.size();
  const Eigen::Index cols = rows ? j[0].size() : 0;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) throw FormatError("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

ComplexVector vector_from_json(const Json& j) {
  const std::vector<cplx> v = complex_list(j);
  ComplexVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

NodeSet nodes_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of nodes");
  std::vector<GPoint> pts;
  for (const auto& e : j) pts.push_back(point_from_json(e));
  return NodeSet(std::move(pts));
}

KernelMatrix kernel_from_json(const Json& j) {
  NodeSet nodes = nodes_from_json(field(j, "nodes"));
  const ComplexMatrix g = matrix_from_json(field(j, "gram"));
  if (g.rows() != static_cast<Eigen::Index>(nodes.size()) || g.cols() != g.rows()) {
    throw FormatError("kernel gram does not match the node count");
  }
  return KernelMatrix(std::move(nodes), HermitianMatrix(g));
}

PickProblem problem_from_json(const Json& j) {
  NodeSet nodes = nodes_from_json(field(j, "nodes"));
  std::vector<cplx> targets = complex_list(field(j, "targets"));
  if (targets.size() != nodes.size()) throw FormatError("problem: node and target counts differ");
  return PickProblem(std::move(nodes), std::move(targets));
}

DecompositionCertificate primal_from_json(const Json& j) {
  if (field(j, "type") != "primal") throw FormatError("expected a primal certificate");
  DecompositionCertificate cert;
  cert.scale = number(field(j, "scale"), "scale");
  cert.residual = number(field(j, "residual"), "residual");
  cert.alphas = complex_list(field(j, "alphas"));
  for (const auto& b : field(j, "blocks")) {
    const ComplexMatrix m = matrix_from_json(b);
    if (m.rows() != m.cols()) throw FormatError("certificate block is not square");
    cert.blocks.emplace_back(m);
  }
  if (cert.blocks.size() != cert.alphas.size()) throw FormatError("certificate: alphas and blocks differ in length");
  return cert;
}

DualCertificate dual_from_json(const Json& j) {
  if (field(j, "type") != "dual") throw FormatError("expected a dual certificate");
  return DualCertificate{kernel_from_json(field(j, "kernel")), number(field(j, "violation"), "violation"),
                         vector_from_json(field(j, "witness")),
                         number(field(j, "admissibility_slack"), "admissibility_slack"),
                         number(field(j, "scale"), "scale")};
}

Colligation colligation_from_json(const Json& j) {
  Colligation c;
  c.alphas = complex_list(field(j, "alphas"));
  for (const auto& d : field(j, "block_dims")) c.block_dims.push_back(d.get<int>());
  c.A = complex_from_json(field(j, "A"));
  c.B = matrix_from_json(field(j, "B"));
  c.C = matrix_from_json(field(j, "C"));
  c.D = matrix_from_json(field(j, "D"));
  c.scale = number(field(j, "scale"), "scale");
  if (j.contains("isometry_defect")) c.isometry_defect = number(j.at("isometry_defect"), "isometry_defect");
  int total = 0;
  for (int d : c.block_dims) total += d;
  if (c.block_dims.size() != c.alphas.size() || c.D.rows() != total || c.D.cols() != total ||
      (total > 0 && (c.B.cols() != total || c.C.rows() != total))) {
    throw FormatError("colligation: block dimensions are inconsistent");
  }
  if (total == 0) {
    c.B = ComplexMatrix(1, 0);
    c.C = ComplexMatrix(0, 1);
    c.D = ComplexMatrix(0, 0);
  }
  return c;
}

StoredExtension extension_from_json(const Json& j) {
  StoredExtension out{problem_from_json(field(j, "problem")), number(field(j, "rho"), "rho"), std::nullopt};
  if (j.contains("extremal_kernel")) out.extremal_kernel = dual_from_json(j.at("extremal_kernel")).kernel;
  return out;
}

std::vector<cplx> disk_lattice(int n) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<cplx> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(std::polar(std::sqrt((k + 0.5) / n), k * golden));
  return out;
}

GridDump write_grid_csv(const std::filesystem::path& path, const RealizedFunction& fn, int n) {
  const std::vector<cplx> z = disk_lattice(n);
  std::string csv = "s_re,s_im,p_re,p_im,f_re,f_im,abs_f\n";
  GridDump dump_info;
  const double scale = fn.colligation.scale;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const GPoint x = GPoint::from_preimage(z[i], z[j]);
      const cplx unit = evaluate(fn, x);
      const cplx f = scale * unit;
      dump_info.observed_sup = std::max(dump_info.observed_sup, std::abs(f));
      dump_info.observed_sup_unit = std::max(dump_info.observed_sup_unit, std::abs(unit));
      for (double v : {x.s().real(), x.s().imag(), x.p().real(), x.p().imag(), f.real(), f.imag()}) {
        csv += number_text(v) + ",";
      }
      csv += number_text(std::abs(f)) + "\n";
      ++dump_info.rows;
    }
  }
  write_atomic(path, csv);
  return dump_info;
}

}  // namespace gamma_pick::io
