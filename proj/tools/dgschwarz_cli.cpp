// Command-line harness: field generation, matrix export, patch spectra,
// single solves, parameter sweeps and exact condition numbers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dgschwarz/experiment.hpp"

namespace fs = std::filesystem;
using namespace dgschwarz;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<int> ns;
  std::optional<int> nc;
  std::optional<std::string> preset;
  std::optional<double> thickness;
  std::optional<std::string> field_file;
  std::optional<double> contrast;
  std::optional<std::string> policy;
  std::optional<std::string> variant;
  std::optional<double> gamma;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--ns", o.ns, "subdomains per side");
  cmd->add_option("--nc", o.nc, "cells per subdomain side");
  cmd->add_option("--preset", o.preset, "field preset (three_rings, channels_inclusions, crossing_channels, uniform)");
  cmd->add_option("--thickness", o.thickness, "ring thickness for three_rings");
  cmd->add_option("--field-file", o.field_file, "coefficient file, one value per triangle");
  cmd->add_option("--contrast", o.contrast, "contrast alpha0 >= 1");
  cmd->add_option("--policy", o.policy, "none | fixed:M | threshold:LAMBDA");
  cmd->add_option("--variant", o.variant, "exact | inexact | one-level");
  cmd->add_option("--gamma", o.gamma, "SIPG penalty");
  cmd->add_option("--tol", o.tol, "PCG relative residual tolerance");
  cmd->add_option("--maxit", o.maxit, "PCG iteration limit");
  cmd->add_option("--workers", o.workers, "worker threads (default: DGSCHWARZ_WORKERS or hardware)");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.ns || o.nc) {
    MeshConfig m = c.meshes.front();
    if (o.ns) m.subdomains_per_side = *o.ns;
    if (o.nc) m.cells_per_subdomain_side = *o.nc;
    c.meshes = {m};
  }
  if (o.preset) {
    c.field.preset = *o.preset;
    c.field.file.reset();
  }
  if (o.thickness) c.field.thickness = *o.thickness;
  if (o.field_file) {
    c.field.file = *o.field_file;
    c.field.preset.clear();
  }
  if (o.contrast) c.contrasts = {*o.contrast};
  if (o.policy) c.policies = {EnrichmentPolicy::parse(*o.policy)};
  if (o.variant) c.variants = {parse_variant(*o.variant)};
  if (o.gamma) c.gamma = *o.gamma;
  if (o.tol) c.solver.tol = *o.tol;
  if (o.maxit) c.solver.maxit = *o.maxit;
  if (o.workers) c.workers = *o.workers;
  validate(c);
  return c;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

void report_single(const RunConfig& c) {
  if (c.meshes.size() > 1 || c.contrasts.size() > 1 || c.policies.size() > 1 || c.variants.size() > 1) {
    std::cerr << "note: using the first mesh, contrast, policy and variant of the configuration\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level additive Schwarz with spectral coarse spaces for SIPG discretizations"};
  app.require_subcommand(1);

  CommonOptions gen_o, asm_o, spec_o, solve_o, sweep_o, oracle_o;

  auto* gen = app.add_subcommand("generate-field", "write a coefficient field file");
  add_common(gen, gen_o);
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "output file")->required();

  auto* asmb = app.add_subcommand("assemble", "export A, A_hat and b in Matrix Market / plain text");
  add_common(asmb, asm_o);
  std::string asm_dir = ".";
  asmb->add_option("-o,--out-dir", asm_dir, "output directory");

  auto* spec = app.add_subcommand("spectrum", "per-patch generalized eigenvalues as CSV");
  add_common(spec, spec_o);
  std::string spec_out;
  spec->add_option("-o,--output", spec_out, "CSV file (default: stdout)");

  auto* solve = app.add_subcommand("solve", "single preconditioned solve");
  add_common(solve, solve_o);
  std::string residuals_out;
  bool solve_oracle = false;
  solve->add_option("--residuals", residuals_out, "residual history CSV");
  solve->add_flag("--oracle", solve_oracle, "also compute the exact condition number");

  auto* sweep = app.add_subcommand("sweep", "run every configured combination and write the result table");
  add_common(sweep, sweep_o);
  bool sweep_pretty = false;
  sweep->add_flag("--pretty", sweep_pretty, "print the formatted table to stdout");

  auto* oracle = app.add_subcommand("oracle", "exact condition number of the preconditioned operator");
  add_common(oracle, oracle_o);
  std::size_t oracle_cap = kDefaultDenseCap;
  bool oracle_large = false;
  oracle->add_option("--max-dense-dim", oracle_cap, "largest dimension for the dense method");
  oracle->add_flag("--large", oracle_large, "use the Lanczos method above the dense cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const RunConfig c = resolve(gen_o);
      report_single(c);
      const Mesh mesh(c.meshes.front());
      save_field(gen_out, make_field(mesh, c.field, c.contrasts.front()));
      std::cerr << "wrote " << mesh.num_triangles() << " values to " << gen_out << '\n';
    } else if (asmb->parsed()) {
      const RunConfig c = resolve(asm_o);
      report_single(c);
      const Mesh mesh(c.meshes.front());
      const CoefficientField field = make_field(mesh, c.field, c.contrasts.front());
      const AssembledSystem sys = assemble(mesh, field, c.gamma);
      const fs::path dir(asm_dir);
      fs::create_directories(dir);
      {
        auto out = open_out(dir / "A.mtx");
        linalg::write_matrix_market(out, sys.a);
      }
      {
        auto out = open_out(dir / "A_hat.mtx");
        linalg::write_matrix_market(out, sys.a_hat);
      }
      {
        auto out = open_out(dir / "b.txt");
        out.precision(17);
        for (double v : sys.rhs) out << v << '\n';
      }
      {
        auto out = open_out(dir / "summary.txt");
        mesh.write_summary(out);
        write_partition_summary(out, build_partition(mesh));
      }
      std::cerr << "wrote A.mtx, A_hat.mtx, b.txt, summary.txt to " << dir << '\n';
    } else if (spec->parsed()) {
      const RunConfig c = resolve(spec_o);
      report_single(c);
      const Mesh mesh(c.meshes.front());
      const CoefficientField field = make_field(mesh, c.field, c.contrasts.front());
      const Partition partition = build_partition(mesh);
      const auto problems = solve_patch_problems(mesh, field, partition, resolve_workers(c));
      if (spec_out.empty()) {
        write_spectrum_csv(std::cout, partition, problems);
      } else {
        auto out = open_out(spec_out);
        write_spectrum_csv(out, partition, problems);
      }
    } else if (solve->parsed() || oracle->parsed()) {
      RunConfig c = resolve(solve->parsed() ? solve_o : oracle_o);
      report_single(c);
      if (oracle->parsed()) {
        c.oracle.enabled = true;
        c.oracle.max_dense_dim = oracle_cap;
        c.oracle.large = oracle_large;
      } else if (solve_oracle) {
        c.oracle.enabled = true;
      }
      const int workers = resolve_workers(c);
      const ProblemContext ctx(c.meshes.front(), c.field, c.contrasts.front(), c.gamma, workers);
      RunArtifacts art;
      const ResultRow row = run_case(ctx, c, c.policies.front(), c.variants.front(), workers, &art);
      if (!art.dropped_rows.empty()) {
        std::cerr << "rank filter dropped " << art.dropped_rows.size() << " coarse rows\n";
      }
      if (!residuals_out.empty() && art.report) {
        auto out = open_out(residuals_out);
        write_residual_csv(out, *art.report);
      }
      write_results_csv(std::cout, {row});
      if (row.status.rfind("error", 0) == 0) {
        std::cerr << row.status << '\n';
        return 1;
      }
    } else if (sweep->parsed()) {
      const RunConfig c = resolve(sweep_o);
      const auto rows = run_sweep(c, &std::cerr);
      write_outputs(c, rows);
      if (!c.output.csv) write_results_csv(std::cout, rows);
      if (sweep_pretty) write_pretty_table(std::cout, rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
