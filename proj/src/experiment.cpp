#include "dgschwarz/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "dgschwarz/parallel.hpp"

namespace dgschwarz {

using nlohmann::json;

Variant parse_variant(const std::string& text) {
  if (text == "exact") return Variant::Exact;
  if (text == "inexact") return Variant::Inexact;
  if (text == "one-level" || text == "one_level") return Variant::OneLevel;
  throw std::invalid_argument("variant: expected exact, inexact or one-level, got '" + text + "'");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Exact:
      return "exact";
    case Variant::Inexact:
      return "inexact";
    case Variant::OneLevel:
      return "one-level";
  }
  return "exact";
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

MeshConfig parse_mesh(const json& j) {
  check_keys(j, {"subdomains_per_side", "cells_per_subdomain_side"}, "mesh");
  return {j.at("subdomains_per_side").get<int>(), j.at("cells_per_subdomain_side").get<int>()};
}

ShapeKind parse_kind(const std::string& s) {
  if (s == "channel") return ShapeKind::Channel;
  if (s == "inclusion") return ShapeKind::Inclusion;
  throw std::invalid_argument("field.shapes: kind must be channel or inclusion");
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::optional<std::filesystem::path> opt_path(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return std::filesystem::path(j.at(key).get<std::string>());
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  check_keys(j, {"mesh", "meshes", "field", "contrasts", "gamma", "policies", "variant", "variants",
                 "multiscale_per_node", "solver", "oracle", "output", "workers"},
             "config");
  RunConfig c;
  try {
    if (j.contains("mesh") && j.contains("meshes")) throw std::invalid_argument("config: give mesh or meshes, not both");
    if (j.contains("mesh")) c.meshes = {parse_mesh(j.at("mesh"))};
    if (j.contains("meshes")) {
      c.meshes.clear();
      for (const auto& m : j.at("meshes")) c.meshes.push_back(parse_mesh(m));
    }
    if (j.contains("field")) {
      const auto& f = j.at("field");
      check_keys(f, {"preset", "thickness", "shapes", "file"}, "field");
      c.field.preset = f.value("preset", std::string());
      c.field.thickness = f.value("thickness", kDefaultRingThickness);
      if (f.contains("shapes")) {
        for (const auto& s : f.at("shapes")) {
          check_keys(s, {"x_min", "x_max", "y_min", "y_max", "kind"}, "field.shapes");
          c.field.shapes.push_back({s.at("x_min").get<double>(), s.at("x_max").get<double>(),
                                    s.at("y_min").get<double>(), s.at("y_max").get<double>(),
                                    parse_kind(s.value("kind", std::string("channel")))});
        }
      }
      c.field.file = opt_path(f, "file");
    }
    if (j.contains("contrasts")) c.contrasts = j.at("contrasts").get<std::vector<double>>();
    c.gamma = j.value("gamma", kDefaultPenalty);
    if (j.contains("policies")) {
      c.policies.clear();
      for (const auto& p : j.at("policies")) c.policies.push_back(EnrichmentPolicy::parse(p.get<std::string>()));
    }
    if (j.contains("variant") && j.contains("variants")) {
      throw std::invalid_argument("config: give variant or variants, not both");
    }
    if (j.contains("variant")) c.variants = {parse_variant(j.at("variant").get<std::string>())};
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j.at("variants")) c.variants.push_back(parse_variant(v.get<std::string>()));
    }
    c.multiscale_per_node = j.value("multiscale_per_node", false);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      check_keys(s, {"tol", "maxit"}, "solver");
      c.solver.tol = s.value("tol", c.solver.tol);
      c.solver.maxit = s.value("maxit", c.solver.maxit);
    }
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      check_keys(o, {"enabled", "max_dense_dim", "large", "lanczos_tol"}, "oracle");
      c.oracle.enabled = o.value("enabled", c.oracle.enabled);
      c.oracle.max_dense_dim = o.value("max_dense_dim", c.oracle.max_dense_dim);
      c.oracle.large = o.value("large", c.oracle.large);
      c.oracle.lanczos_tol = o.value("lanczos_tol", c.oracle.lanczos_tol);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      check_keys(o, {"csv", "pretty", "condplot", "timings", "spectra_dir", "residuals_dir"}, "output");
      c.output.csv = opt_path(o, "csv");
      c.output.pretty = opt_path(o, "pretty");
      c.output.condplot = opt_path(o, "condplot");
      c.output.timings = opt_path(o, "timings");
      c.output.spectra_dir = opt_path(o, "spectra_dir");
      c.output.residuals_dir = opt_path(o, "residuals_dir");
    }
    c.workers = j.value("workers", 0);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void validate(const RunConfig& c) {
  if (c.meshes.empty()) throw std::invalid_argument("config: at least one mesh is required");
  for (const auto& m : c.meshes) {
    if (m.subdomains_per_side < 1 || m.cells_per_subdomain_side < 1) {
      throw std::invalid_argument("config: mesh sizes must be >= 1");
    }
    if (m.subdomains_per_side >= 3 && m.cells_per_subdomain_side < 2) {
      throw std::invalid_argument("config: 3 or more subdomains per side need at least 2 cells per subdomain side");
    }
    if (c.field.preset == "three_rings" && c.field.thickness < 2.0 * m.h() * (1.0 - 1e-12)) {
      throw std::invalid_argument("config: ring thickness is below 2h for mesh " +
                                  std::to_string(m.subdomains_per_side) + "x" +
                                  std::to_string(m.cells_per_subdomain_side));
    }
  }
  if (c.field.file && c.meshes.size() != 1) throw std::invalid_argument("config: a field file needs exactly one mesh");
  if (!c.field.preset.empty()) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), c.field.preset) == names.end()) {
      throw std::invalid_argument("config: unknown field preset '" + c.field.preset + "'");
    }
  }
  if (c.contrasts.empty()) throw std::invalid_argument("config: at least one contrast is required");
  for (double a : c.contrasts) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw std::invalid_argument("config: contrasts must be finite and >= 1");
  }
  if (!(c.gamma > 0.0)) throw std::invalid_argument("config: gamma must be positive");
  if (c.policies.empty()) throw std::invalid_argument("config: at least one policy is required");
  if (c.variants.empty()) throw std::invalid_argument("config: at least one variant is required");
  if (!(c.solver.tol > 0.0 && c.solver.tol < 1.0)) throw std::invalid_argument("config: solver.tol must be in (0, 1)");
  if (c.solver.maxit < 1) throw std::invalid_argument("config: solver.maxit must be >= 1");
  if (!(c.oracle.lanczos_tol > 0.0)) throw std::invalid_argument("config: oracle.lanczos_tol must be positive");
  if (c.workers < 0) throw std::invalid_argument("config: workers must be >= 0");
}

int resolve_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("DGSCHWARZ_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return default_workers();
}

CoefficientField make_field(const Mesh& mesh, const FieldConfig& field, double contrast) {
  if (field.file) {
    auto loaded = load_field(*field.file, mesh.num_triangles());
    return std::move(loaded.field);
  }
  if (field.preset == "three_rings") {
    return preset_three_rings(mesh, contrast, kDefaultRingHalfwidths, field.thickness);
  }
  if (!field.preset.empty()) return generate(mesh, preset_spec(field.preset, contrast));
  FieldSpec spec;
  spec.contrast = contrast;
  spec.shapes = field.shapes;
  return generate(mesh, spec);
}

ProblemContext::ProblemContext(const MeshConfig& mesh_config, const FieldConfig& field_config, double contrast,
                               double gamma, int workers)
    : contrast(contrast),
      mesh(mesh_config),
      field(make_field(mesh, field_config, contrast)),
      system(assemble(mesh, field, gamma)),
      partition(build_partition(mesh)),
      patches(solve_patch_problems(mesh, field, partition, workers)),
      extender(std::make_unique<HarmonicExtender>(system.a, partition, workers)) {}

ResultRow run_case(const ProblemContext& ctx, const RunConfig& config, const EnrichmentPolicy& policy,
                   Variant variant, int workers, RunArtifacts* artifacts) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.alpha0 = ctx.contrast;
  row.h = ctx.mesh.h();
  row.subdomains_per_side = ctx.mesh.config().subdomains_per_side;
  row.cells_per_subdomain_side = ctx.mesh.config().cells_per_subdomain_side;
  row.policy = variant == Variant::OneLevel ? "-" : policy.label();
  row.variant = variant_name(variant);
  try {
    CoarseSpace coarse;
    if (variant != Variant::OneLevel) {
      CoarseOptions opts;
      opts.policy = policy;
      opts.multiscale_per_node = config.multiscale_per_node;
      opts.workers = workers;
      coarse = build_coarse_space(ctx.mesh, ctx.partition, ctx.system.a, ctx.patches, *ctx.extender, opts);
      row.multiscale = coarse.multiscale_count;
      row.m_total = coarse.spectral_count;
      row.coarse_dim = static_cast<int>(coarse.dim());
      row.min_lambda_next = coarse.min_lambda_next;
      row.m_max = coarse.max_m();
      if (artifacts) artifacts->dropped_rows = coarse.dropped_rows;
    } else {
      row.min_lambda_next = std::numeric_limits<double>::infinity();
    }
    const AdditiveSchwarz precond =
        build_preconditioner(ctx.system.a, ctx.system.a_hat, ctx.partition, variant == Variant::OneLevel ? nullptr : &coarse,
                             variant == Variant::Inexact ? LocalVariant::Inexact : LocalVariant::Exact, 1);
    const Preconditioner m = [&precond](std::span<const double> r, std::span<double> z) { precond.apply(r, z); };

    PcgOptions popts;
    popts.tol = config.solver.tol;
    popts.maxit = config.solver.maxit;
    const PcgResult res = pcg(ctx.system.a, ctx.system.rhs, m, popts);
    row.kappa_est = res.report.kappa_est;
    row.iterations = res.report.iterations;
    row.converged = res.report.converged;
    if (artifacts) artifacts->report = res.report;

    if (config.oracle.enabled) {
      const std::size_t n = ctx.system.a.dim();
      if (n <= config.oracle.max_dense_dim) {
        const auto o = dense_condition_oracle(ctx.system.a, m, config.oracle.max_dense_dim);
        row.kappa_oracle = o.kappa;
        row.oracle_method = o.method;
      } else if (config.oracle.large) {
        LanczosOracleOptions lopts;
        lopts.tol = config.oracle.lanczos_tol;
        const auto o = lanczos_condition_oracle(ctx.system.a, m, lopts);
        row.kappa_oracle = o.kappa;
        row.oracle_method = o.converged ? o.method : o.method + "-unconverged";
      } else {
        row.oracle_method = "skipped";
      }
    }
    if (!row.converged) row.status = "maxit";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace {

std::string case_tag(const MeshConfig& m, double contrast) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "ns%d_nc%d_a%g", m.subdomains_per_side, m.cells_per_subdomain_side, contrast);
  return buf;
}

}  // namespace

std::vector<ResultRow> run_sweep(const RunConfig& config, std::ostream* log) {
  validate(config);
  struct Group {
    MeshConfig mesh;
    double contrast;
  };
  std::vector<Group> groups;
  for (const auto& m : config.meshes) {
    for (double a : config.contrasts) groups.push_back({m, a});
  }
  std::vector<std::pair<Variant, EnrichmentPolicy>> runs;
  for (Variant v : config.variants) {
    if (v == Variant::OneLevel) {
      runs.emplace_back(v, EnrichmentPolicy::fixed(0));
      continue;
    }
    for (const auto& p : config.policies) runs.emplace_back(v, p);
  }

  const int workers = resolve_workers(config);
  const int outer = std::min<int>(workers, static_cast<int>(groups.size()));
  const int inner = std::max(1, workers / std::max(1, outer));

  std::vector<std::vector<ResultRow>> per_group(groups.size());
  std::vector<std::string> messages(groups.size());
  parallel_for(
      groups.size(),
      [&](std::size_t g) {
        const Group& grp = groups[g];
        std::ostringstream msg;
        std::unique_ptr<ProblemContext> ctx;
        std::string failure;
        try {
          ctx = std::make_unique<ProblemContext>(grp.mesh, config.field, grp.contrast, config.gamma, inner);
          if (config.output.spectra_dir) {
            std::filesystem::create_directories(*config.output.spectra_dir);
            std::ofstream out(*config.output.spectra_dir / ("spectrum_" + case_tag(grp.mesh, grp.contrast) + ".csv"));
            write_spectrum_csv(out, ctx->partition, ctx->patches);
          }
        } catch (const std::exception& e) {
          failure = std::string("error: ") + e.what();
        }
        for (const auto& [variant, policy] : runs) {
          ResultRow row;
          if (ctx) {
            RunArtifacts art;
            row = run_case(*ctx, config, policy, variant, inner, &art);
            if (!art.dropped_rows.empty()) {
              msg << case_tag(grp.mesh, grp.contrast) << ' ' << policy.label() << ": rank filter dropped "
                  << art.dropped_rows.size() << " coarse rows\n";
            }
            if (config.output.residuals_dir && art.report) {
              std::filesystem::create_directories(*config.output.residuals_dir);
              std::string name = "residuals_" + case_tag(grp.mesh, grp.contrast) + "_" + variant_name(variant) + "_" +
                                 (variant == Variant::OneLevel ? std::string("none") : policy.label()) + ".csv";
              std::replace(name.begin(), name.end(), ':', '-');
              std::ofstream out(*config.output.residuals_dir / name);
              write_residual_csv(out, *art.report);
            }
          } else {
            row.h = grp.mesh.h();
            row.subdomains_per_side = grp.mesh.subdomains_per_side;
            row.cells_per_subdomain_side = grp.mesh.cells_per_subdomain_side;
            row.policy = variant == Variant::OneLevel ? "-" : policy.label();
            row.variant = variant_name(variant);
            row.status = failure;
          }
          row.alpha0 = grp.contrast;
          msg << case_tag(grp.mesh, grp.contrast) << ' ' << row.variant << ' ' << row.policy << ": kappa_est "
              << format_double(row.kappa_est) << " iterations " << row.iterations << " status " << row.status << '\n';
          per_group[g].push_back(std::move(row));
        }
        messages[g] = msg.str();
      },
      outer);

  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (log) *log << messages[g];
    for (auto& r : per_group[g]) rows.push_back(std::move(r));
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "alpha0,h,N_s,n_c,policy,variant,M_total,multiscale,coarse_dim,min_lambda_next,M_max,kappa_est,"
         "kappa_oracle,oracle_method,iterations,converged,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << format_double(r.alpha0) << ',' << format_double(r.h) << ',' << r.subdomains_per_side << ','
        << r.cells_per_subdomain_side << ',' << r.policy << ',' << r.variant << ',' << r.m_total << ','
        << r.multiscale << ',' << r.coarse_dim << ',' << format_double(r.min_lambda_next) << ',' << r.m_max << ','
        << format_double(r.kappa_est) << ',' << (r.kappa_oracle ? format_double(*r.kappa_oracle) : "") << ','
        << r.oracle_method << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << status << '\n';
  }
}

void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "alpha0,h,policy,variant,wall_seconds\n";
  for (const auto& r : rows) {
    out << format_double(r.alpha0) << ',' << format_double(r.h) << ',' << r.policy << ',' << r.variant << ','
        << format_double(r.wall_seconds) << '\n';
  }
}

void write_condplot_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "alpha0,h,policy,variant,inv_lambda_next,kappa_est,kappa_oracle\n";
  for (const auto& r : rows) {
    if (r.variant == "one-level") continue;
    out << format_double(r.alpha0) << ',' << format_double(r.h) << ',' << r.policy << ',' << r.variant << ','
        << format_double(1.0 / r.min_lambda_next) << ',' << format_double(r.kappa_est) << ','
        << (r.kappa_oracle ? format_double(*r.kappa_oracle) : "") << '\n';
  }
}

void write_pretty_table(std::ostream& out, const std::vector<ResultRow>& rows) {
  std::vector<std::string> columns;
  std::vector<std::pair<double, double>> lines;  // (h, alpha0) in first-seen order
  std::map<std::tuple<double, double, std::string>, const ResultRow*> cell;
  for (const auto& r : rows) {
    const std::string col = r.variant == "exact" ? r.policy : r.variant + " " + r.policy;
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    const std::pair<double, double> key{r.h, r.alpha0};
    if (std::find(lines.begin(), lines.end(), key) == lines.end()) lines.push_back(key);
    cell[{r.h, r.alpha0, col}] = &r;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %-10s", "h", "alpha0");
  out << buf;
  for (const auto& c : columns) {
    std::snprintf(buf, sizeof buf, " | %-24s", c.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& [h, a] : lines) {
    std::snprintf(buf, sizeof buf, "1/%-8.0f %-10.0e", 1.0 / h, a);
    out << buf;
    for (const auto& c : columns) {
      std::string text = "-";
      if (auto it = cell.find({h, a, c}); it != cell.end()) {
        const ResultRow& r = *it->second;
        if (r.status.rfind("error", 0) == 0) {
          text = "error";
        } else {
          const double kappa = r.kappa_oracle ? *r.kappa_oracle : r.kappa_est;
          std::snprintf(buf, sizeof buf, "%.4g (%d)", kappa, r.iterations);
          text = buf;
          if (r.policy.rfind("threshold", 0) == 0) {
            std::snprintf(buf, sizeof buf, " [%02d]", r.m_max);
            text += buf;
          }
        }
      }
      std::snprintf(buf, sizeof buf, " | %-24s", text.c_str());
      out << buf;
    }
    out << '\n';
  }
}

void write_outputs(const RunConfig& config, const std::vector<ResultRow>& rows) {
  auto open = [](const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    return out;
  };
  if (config.output.csv) {
    auto out = open(*config.output.csv);
    write_results_csv(out, rows);
  }
  if (config.output.timings) {
    auto out = open(*config.output.timings);
    write_timings_csv(out, rows);
  }
  if (config.output.condplot) {
    auto out = open(*config.output.condplot);
    write_condplot_csv(out, rows);
  }
  if (config.output.pretty) {
    auto out = open(*config.output.pretty);
    write_pretty_table(out, rows);
  }
}

}  // namespace dgschwarz
