#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dgschwarz/coarse.hpp"
#include "dgschwarz/coeff.hpp"
#include "dgschwarz/decomp.hpp"
#include "dgschwarz/krylov.hpp"
#include "dgschwarz/mesh.hpp"
#include "dgschwarz/schwarz.hpp"
#include "dgschwarz/sipg.hpp"

namespace dgschwarz {

enum class Variant { Exact, Inexact, OneLevel };

Variant parse_variant(const std::string& text);
std::string variant_name(Variant v);

struct FieldConfig {
  std::string preset = "three_rings";
  double thickness = kDefaultRingThickness;  // three_rings only
  std::vector<Rect> shapes;                  // used when preset is empty
  std::optional<std::filesystem::path> file;
};

struct SolverConfig {
  double tol = 1e-6;
  int maxit = 2000;
};

struct OracleConfig {
  bool enabled = false;
  std::size_t max_dense_dim = kDefaultDenseCap;
  /// Fall back to the Lanczos oracle above the dense cap.
  bool large = false;
  double lanczos_tol = 1e-8;
};

struct OutputConfig {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> pretty;
  std::optional<std::filesystem::path> condplot;
  std::optional<std::filesystem::path> timings;
  std::optional<std::filesystem::path> spectra_dir;
  std::optional<std::filesystem::path> residuals_dir;
};

struct RunConfig {
  std::vector<MeshConfig> meshes{MeshConfig{2, 8}};
  FieldConfig field;
  std::vector<double> contrasts{1.0};
  double gamma = kDefaultPenalty;
  std::vector<EnrichmentPolicy> policies{EnrichmentPolicy::fixed(0)};
  std::vector<Variant> variants{Variant::Exact};
  bool multiscale_per_node = false;
  SolverConfig solver;
  OracleConfig oracle;
  OutputConfig output;
  /// 0: take DGSCHWARZ_WORKERS from the environment, else the hardware count.
  int workers = 0;
};

/// Parses and validates a JSON configuration. Unknown keys are errors.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Throws std::invalid_argument describing the first problem found.
void validate(const RunConfig& config);
int resolve_workers(const RunConfig& config);

CoefficientField make_field(const Mesh& mesh, const FieldConfig& field, double contrast);

struct ResultRow {
  double alpha0 = 1.0;
  double h = 0.0;
  int subdomains_per_side = 0;
  int cells_per_subdomain_side = 0;
  std::string policy;
  std::string variant;
  int m_total = 0;
  int multiscale = 0;
  int coarse_dim = 0;
  double min_lambda_next = 0.0;  // +inf when no patch has an unselected eigenvalue
  int m_max = 0;
  double kappa_est = 0.0;
  std::optional<double> kappa_oracle;
  std::string oracle_method;
  int iterations = 0;
  bool converged = false;
  std::string status = "ok";
  double wall_seconds = 0.0;  // not part of the CSV
};

/// Everything that depends only on (mesh, contrast): shared by all policies.
struct ProblemContext {
  double contrast = 1.0;
  Mesh mesh;
  CoefficientField field;
  AssembledSystem system;
  Partition partition;
  std::vector<PatchProblem> patches;
  std::unique_ptr<HarmonicExtender> extender;

  ProblemContext(const MeshConfig& mesh_config, const FieldConfig& field_config, double contrast, double gamma,
                 int workers);
};

struct RunArtifacts {
  std::optional<PcgReport> report;
  std::vector<int> dropped_rows;
};

ResultRow run_case(const ProblemContext& ctx, const RunConfig& config, const EnrichmentPolicy& policy,
                   Variant variant, int workers, RunArtifacts* artifacts = nullptr);

/// Every (mesh, contrast, variant, policy) combination in config order.
/// Rows that fail carry the error in `status`; the sweep continues.
std::vector<ResultRow> run_sweep(const RunConfig& config, std::ostream* log = nullptr);

/// Writes every artifact named in config.output.
void write_outputs(const RunConfig& config, const std::vector<ResultRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_condplot_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Table with one line per (h, alpha0) and one column per policy:
/// "kappa (iterations)" plus "[max M]" for threshold policies.
void write_pretty_table(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace dgschwarz
