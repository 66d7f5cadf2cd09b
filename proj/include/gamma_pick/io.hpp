#pragma once

// JSON and CSV formats. Complex numbers are [re, im] pairs, points of G are
// [s_re, s_im, p_re, p_im], matrices are row-major nested arrays of complex
// numbers. Output numbers carry 17 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamma_pick/errors.hpp"
#include "gamma_pick/extension.hpp"
#include "gamma_pick/hardy.hpp"
#include "gamma_pick/pick.hpp"
#include "gamma_pick/realization.hpp"

namespace gamma_pick::io {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Deterministic text form: two-space indentation, "%.17g" numbers.
std::string dump(const Json& j);

Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(cplx z);
Json to_json(const GPoint& x);
Json to_json(const ComplexMatrix& m);
Json vector_to_json(const ComplexVector& v);
Json to_json(const NodeSet& nodes);
Json to_json(const KernelMatrix& k);
Json to_json(const PickProblem& problem);
Json to_json(const SolverConfig& config);
Json to_json(const DecompositionCertificate& cert);
Json to_json(const DualCertificate& cert);
Json to_json(const FeasibilityVerdict& verdict);
Json to_json(const Colligation& col);
Json to_json(const VonNeumannAudit& audit);
Json to_json(const ExtensionResult& result);
Json to_json(const HardyCheckReport& report);

cplx complex_from_json(const Json& j);
GPoint point_from_json(const Json& j);
ComplexMatrix matrix_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);
NodeSet nodes_from_json(const Json& j);
KernelMatrix kernel_from_json(const Json& j);
PickProblem problem_from_json(const Json& j);
DecompositionCertificate primal_from_json(const Json& j);
DualCertificate dual_from_json(const Json& j);
Colligation colligation_from_json(const Json& j);

/// Problem, rho and (when present) the extremal kernel of a stored ExtensionResult.
struct StoredExtension {
  PickProblem problem;
  double rho;
  std::optional<KernelMatrix> extremal_kernel;
};
StoredExtension extension_from_json(const Json& j);

/// n points of a golden-angle lattice in the open unit disk.
std::vector<cplx> disk_lattice(int n);

struct GridDump {
  std::size_t rows = 0;
  double observed_sup = 0.0;  // max |f| for the user-facing (scaled) interpolant
  double observed_sup_unit = 0.0;
};

/// Evaluates fn at pi(z_i, z_j), i <= j, over disk_lattice(n) and writes the
/// CSV dump (s_re,s_im,p_re,p_im,f_re,f_im,abs_f).
GridDump write_grid_csv(const std::filesystem::path& path, const RealizedFunction& fn, int n);

}  // namespace gamma_pick::io
