#include "dgschwarz/coeff.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dgschwarz {

namespace {

void validate(const FieldSpec& spec) {
  if (!(spec.contrast >= 1.0) || !std::isfinite(spec.contrast)) {
    throw std::invalid_argument("field: contrast must be a finite value >= 1");
  }
  for (const auto& r : spec.shapes) {
    const bool inside = r.x_min >= 0.0 && r.x_max <= 1.0 && r.y_min >= 0.0 && r.y_max <= 1.0;
    if (!inside || r.x_min > r.x_max || r.y_min > r.y_max) {
      throw std::invalid_argument("field: rectangles must be ordered and lie inside the unit square");
    }
  }
}

Rect channel(double x0, double x1, double y0, double y1) { return {x0, x1, y0, y1, ShapeKind::Channel}; }
Rect inclusion(double x0, double x1, double y0, double y1) { return {x0, x1, y0, y1, ShapeKind::Inclusion}; }

FieldSpec channels_inclusions_spec(double contrast) {
  constexpr double w = 1.0 / 32.0;
  FieldSpec s;
  s.contrast = contrast;
  s.preset = "channels_inclusions";
  s.shapes = {
      channel(0.0625, 0.9375, 0.15625, 0.15625 + w),
      channel(0.171875, 0.828125, 0.40625, 0.40625 + w),
      channel(0.0625, 0.9375, 0.65625, 0.65625 + w),
      channel(0.25, 0.75, 0.84375, 0.84375 + w),
      channel(0.28125, 0.28125 + w, 0.09375, 0.90625),
      channel(0.6875, 0.6875 + w, 0.09375, 0.90625),
  };
  // Short bars, mirrored about x = 1/2.
  constexpr double len = 1.0 / 16.0;
  constexpr double thin = 1.0 / 64.0;
  for (double xc : {0.1875, 0.4375}) {
    for (double yc : {0.28125, 0.53125, 0.78125}) {
      s.shapes.push_back(inclusion(xc - len / 2, xc + len / 2, yc - thin / 2, yc + thin / 2));
      s.shapes.push_back(inclusion(1.0 - xc - len / 2, 1.0 - xc + len / 2, yc - thin / 2, yc + thin / 2));
    }
  }
  for (double xc : {0.125, 0.375}) {
    for (double yc : {0.03125 + 0.0625, 0.5, 0.9375 - 0.0625}) {
      s.shapes.push_back(inclusion(xc - thin / 2, xc + thin / 2, yc - len / 2, yc + len / 2));
      s.shapes.push_back(inclusion(1.0 - xc - thin / 2, 1.0 - xc + thin / 2, yc - len / 2, yc + len / 2));
    }
  }
  return s;
}

FieldSpec crossing_channels_spec(double contrast) {
  constexpr double w = 1.0 / 32.0;
  FieldSpec s;
  s.contrast = contrast;
  s.preset = "crossing_channels";
  s.shapes = {
      channel(0.03125, 0.96875, 0.21875, 0.21875 + w), channel(0.125, 0.96875, 0.59375, 0.59375 + w),
      channel(0.0625, 0.6875, 0.84375, 0.84375 + w),   channel(0.34375, 0.34375 + w, 0.03125, 0.96875),
      channel(0.71875, 0.71875 + w, 0.15625, 0.84375), channel(0.15625, 0.15625 + w, 0.375, 0.96875),
      channel(0.53125, 0.53125 + w, 0.0625, 0.46875),  channel(0.40625, 0.90625, 0.40625, 0.40625 + w),
  };
  return s;
}

}  // namespace

CoefficientField generate(const Mesh& mesh, const FieldSpec& spec) {
  validate(spec);
  std::vector<double> alpha(mesh.num_triangles(), 1.0);
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    const Point c = mesh.barycenter(static_cast<int>(t));
    for (const auto& r : spec.shapes) {
      if (r.contains(c)) {
        alpha[t] = spec.contrast;
        break;
      }
    }
  }
  return CoefficientField(std::move(alpha));
}

FieldSpec three_rings_spec(double contrast, std::array<double, 3> halfwidths, double thickness) {
  FieldSpec s;
  s.contrast = contrast;
  s.preset = "three_rings";
  const double half = 0.5 * thickness;
  for (double hw : halfwidths) {
    if (!(hw - half > 0.0) || hw + half >= 0.5) {
      throw std::invalid_argument("three_rings: ring must stay clear of the centre and of the boundary");
    }
    const double lo = 0.5 - hw;
    const double hi = 0.5 + hw;
    s.shapes.push_back(channel(lo - half, hi + half, lo - half, lo + half));
    s.shapes.push_back(channel(lo - half, hi + half, hi - half, hi + half));
    s.shapes.push_back(channel(lo - half, lo + half, lo - half, hi + half));
    s.shapes.push_back(channel(hi - half, hi + half, lo - half, hi + half));
  }
  return s;
}

CoefficientField preset_three_rings(const Mesh& mesh, double contrast, std::array<double, 3> halfwidths,
                                    double thickness) {
  if (thickness < 2.0 * mesh.h() * (1.0 - 1e-12)) {
    throw std::invalid_argument("three_rings: thickness below 2h does not resolve the rings");
  }
  return generate(mesh, three_rings_spec(contrast, halfwidths, thickness));
}

FieldSpec preset_spec(const std::string& name, double contrast) {
  if (name == "three_rings") return three_rings_spec(contrast);
  if (name == "channels_inclusions") return channels_inclusions_spec(contrast);
  if (name == "crossing_channels") return crossing_channels_spec(contrast);
  if (name == "uniform") {
    FieldSpec s;
    s.contrast = contrast;
    s.preset = "uniform";
    return s;
  }
  throw std::invalid_argument("unknown field preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"three_rings", "channels_inclusions", "crossing_channels", "uniform"}; }

void save_field(const std::filesystem::path& path, const CoefficientField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  for (double a : field.values()) out << a << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

LoadedField load_field(const std::filesystem::path& path, std::size_t num_triangles, LoadOptions options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  LoadedField result;
  std::vector<double> alpha;
  alpha.reserve(num_triangles);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::istringstream iss(line.substr(first, last - first + 1));
    double v = 0.0;
    std::string rest;
    if (!(iss >> v) || (iss >> rest)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected one number");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": coefficient must be positive");
    }
    if (v < 1.0) {
      if (options.enforce_normalization) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": coefficient below 1 violates the alpha >= 1 normalization");
      }
      result.warnings.push_back("line " + std::to_string(line_no) + ": coefficient " + line.substr(first) +
                                " is below 1");
    }
    alpha.push_back(v);
  }
  if (alpha.size() != num_triangles) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(num_triangles) + " rows, found " +
                             std::to_string(alpha.size()));
  }
  result.field = CoefficientField(std::move(alpha));
  return result;
}

}  // namespace dgschwarz
