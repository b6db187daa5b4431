#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgschwarz/mesh.hpp"

namespace dgschwarz {

/// Per-triangle coefficient, normalized so that alpha >= 1.
class CoefficientField {
 public:
  CoefficientField() = default;
  explicit CoefficientField(std::vector<double> alpha) : alpha_(std::move(alpha)) {}

  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t t) const { return alpha_[t]; }
  std::span<const double> values() const { return alpha_; }

  bool operator==(const CoefficientField&) const = default;

 private:
  std::vector<double> alpha_;
};

enum class ShapeKind { Channel, Inclusion };

struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  ShapeKind kind = ShapeKind::Channel;

  bool contains(const Point& p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
};

/// Background value 1, value `contrast` inside any of the rectangles.
struct FieldSpec {
  double contrast = 1.0;
  std::vector<Rect> shapes;
  std::optional<std::string> preset;
};

CoefficientField generate(const Mesh& mesh, const FieldSpec& spec);

inline constexpr std::array<double, 3> kDefaultRingHalfwidths{0.125, 0.25, 0.375};
inline constexpr double kDefaultRingThickness = 1.0 / 16.0;

/// Three closed square rings centred at (1/2, 1/2). Every ring crosses each of
/// the four interfaces of a 2x2 decomposition exactly once, and the field is
/// invariant under the symmetries of the square.
FieldSpec three_rings_spec(double contrast, std::array<double, 3> halfwidths = kDefaultRingHalfwidths,
                           double thickness = kDefaultRingThickness);

/// Throws when `thickness` < 2h, i.e. a ring would not be resolved.
CoefficientField preset_three_rings(const Mesh& mesh, double contrast,
                                    std::array<double, 3> halfwidths = kDefaultRingHalfwidths,
                                    double thickness = kDefaultRingThickness);

/// Named presets: "three_rings", "channels_inclusions" (channel network with
/// small inclusions, symmetric about x = 1/2), "crossing_channels" (long
/// channels crossing each other across many subdomains), "uniform".
FieldSpec preset_spec(const std::string& name, double contrast);
std::vector<std::string> preset_names();

struct LoadOptions {
  /// When false, values in (0, 1) are accepted and reported as warnings.
  bool enforce_normalization = true;
};

struct LoadedField {
  CoefficientField field;
  std::vector<std::string> warnings;
};

/// One value per line, triangle order, round-trip precision.
void save_field(const std::filesystem::path& path, const CoefficientField& field);
LoadedField load_field(const std::filesystem::path& path, std::size_t num_triangles, LoadOptions options = {});

}  // namespace dgschwarz
