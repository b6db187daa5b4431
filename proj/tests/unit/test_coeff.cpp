#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dgschwarz/coeff.hpp"

using namespace dgschwarz;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("dgschwarz_test_coeff_" + name); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

double high_area(const Mesh& m, const CoefficientField& f, double contrast) {
  double s = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    if (f[t] == contrast) s += m.area(static_cast<int>(t));
  }
  return s;
}

}  // namespace

TEST_CASE("field values are 1 or the contrast") {
  const Mesh m(MeshConfig{2, 16});
  for (const auto& name : preset_names()) {
    const CoefficientField f = generate(m, preset_spec(name, 1e4));
    REQUIRE(f.size() == m.num_triangles());
    for (double v : f.values()) CHECK((v == 1.0 || v == 1e4));
    if (name == "uniform") CHECK(high_area(m, f, 1e4) == 0.0);
    else CHECK(high_area(m, f, 1e4) > 0.0);
  }
  CHECK_THROWS_AS(preset_spec("stripes", 10.0), std::invalid_argument);
}

TEST_CASE("three rings cover the expected area") {
  // Ring of half-width w and thickness t: (2w + t)^2 - (2w - t)^2 = 8 w t.
  const Mesh m(MeshConfig{2, 16});
  const double t = kDefaultRingThickness;
  double expect = 0.0;
  for (double w : kDefaultRingHalfwidths) expect += 8.0 * w * t;
  const CoefficientField f = preset_three_rings(m, 1e6);
  CHECK(high_area(m, f, 1e6) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("three rings are symmetric about both midlines") {
  const Mesh m(MeshConfig{2, 16});
  const CoefficientField f = preset_three_rings(m, 1e2);
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) {
    CHECK(f[t] == f[m.mirror_triangle(t, MirrorAxis::X)]);
    CHECK(f[t] == f[m.mirror_triangle(t, MirrorAxis::Y)]);
  }
}

TEST_CASE("channels with inclusions are symmetric about x = 1/2") {
  const Mesh m(MeshConfig{8, 16});
  const CoefficientField f = generate(m, preset_spec("channels_inclusions", 1e3));
  for (int t = 0; t < static_cast<int>(m.num_triangles()); ++t) CHECK(f[t] == f[m.mirror_triangle(t, MirrorAxis::X)]);
}

TEST_CASE("unresolved rings and bad specs are rejected") {
  const Mesh coarse(MeshConfig{2, 8});
  CHECK_THROWS_AS(preset_three_rings(coarse, 10.0), std::invalid_argument);
  CHECK_NOTHROW(preset_three_rings(coarse, 10.0, kDefaultRingHalfwidths, 2.0 * coarse.h()));

  FieldSpec s;
  s.contrast = 0.5;
  CHECK_THROWS_AS(generate(coarse, s), std::invalid_argument);
  s.contrast = 10.0;
  s.shapes.push_back(Rect{0.5, 1.2, 0.0, 0.1});
  CHECK_THROWS_AS(generate(coarse, s), std::invalid_argument);
}

TEST_CASE("save and load round trip") {
  const Mesh m(MeshConfig{2, 8});
  const CoefficientField f = generate(m, preset_spec("crossing_channels", 3.0e5 + 0.125));
  const fs::path p = temp_file("roundtrip.txt");
  save_field(p, f);
  const LoadedField back = load_field(p, m.num_triangles());
  CHECK(back.field == f);
  CHECK(back.warnings.empty());
  fs::remove(p);
}

TEST_CASE("load reports malformed files") {
  const fs::path p = temp_file("bad.txt");
  write_text(p, "1\n2\n");
  CHECK_THROWS(load_field(p, 3));
  write_text(p, "1\nabc\n3\n");
  CHECK_THROWS(load_field(p, 3));
  write_text(p, "1\n-2\n3\n");
  CHECK_THROWS(load_field(p, 3));
  write_text(p, "1\n0.5\n3\n");
  CHECK_THROWS(load_field(p, 3));
  const LoadedField relaxed = load_field(p, 3, LoadOptions{false});
  CHECK(relaxed.warnings.size() == 1);
  CHECK(relaxed.field[1] == 0.5);
  fs::remove(p);
  CHECK_THROWS(load_field(temp_file("missing.txt"), 3));
}
