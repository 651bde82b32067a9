#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesh.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"

namespace g = pattern_gauge::geometry;
using pattern_gauge::MeshingError;
using pattern_gauge::ParameterError;
constexpr double kPi = std::numbers::pi;

namespace {

double min_curvature(const g::DomainSpec& spec, int samples = 20000) {
  double m = 1e300;
  for (int i = 0; i < samples; ++i) m = std::min(m, spec.outer().curvature(static_cast<double>(i) / samples));
  return m;
}

}  // namespace

TEST_CASE("gallery curvature oracles") {
  auto disk = g::make_gallery_domain("disk", {{"r", 2.0}});
  CHECK(disk.outer().curvature(0.3) == doctest::Approx(0.5).epsilon(1e-12));

  auto ell = g::make_gallery_domain("ellipse", {{"a", 2.0}, {"b", 1.0}});
  CHECK(min_curvature(ell) == doctest::Approx(0.25).epsilon(1e-6));

  // Peanut neck curvature (1 - 5d) / (1 - d)^2, which is also the minimum.
  for (double d : {0.1, 0.3, 0.8}) {
    auto p = g::make_gallery_domain("peanut", {{"d", d}});
    const double neck = (1.0 - 5.0 * d) / ((1.0 - d) * (1.0 - d));
    CHECK(p.outer().curvature(0.25) == doctest::Approx(neck).epsilon(1e-9));
    CHECK(min_curvature(p) == doctest::Approx(neck).epsilon(1e-6));
  }
  CHECK(min_curvature(g::make_gallery_domain("peanut", {{"d", 0.3}})) == doctest::Approx(-1.0204081633).epsilon(1e-8));
  CHECK(min_curvature(g::make_gallery_domain("peanut", {{"d", 0.8}})) == doctest::Approx(-75.0).epsilon(1e-6));
  CHECK(min_curvature(g::make_gallery_domain("peanut", {{"d", 0.1}})) == doctest::Approx(0.6172839506).epsilon(1e-8));
}

TEST_CASE("gallery parameters are validated") {
  CHECK_THROWS_AS(g::make_gallery_domain("disk", {{"r", -1.0}}), ParameterError);
  CHECK_THROWS_AS(g::make_gallery_domain("disk", {{"radius", 1.0}}), ParameterError);
  CHECK_THROWS_AS(g::make_gallery_domain("peanut", {{"d", 1.0}}), ParameterError);
  CHECK_THROWS_AS(g::make_gallery_domain("perturbed_disk", {{"r", 1.0}, {"delta", 0.1}, {"k", 2.5}}), ParameterError);
  CHECK_THROWS_AS(g::make_gallery_domain("torus", {}), ParameterError);
}

TEST_CASE("spline domains reject self-intersection") {
  std::vector<g::Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(g::validate_domain(g::make_spline_domain(bowtie)), ParameterError);
  std::vector<g::Vec2> blob;
  for (int i = 0; i < 12; ++i) {
    double t = 2 * kPi * i / 12;
    blob.emplace_back((1.0 + 0.2 * std::cos(3 * t)) * std::cos(t), (1.0 + 0.2 * std::cos(3 * t)) * std::sin(t));
  }
  auto spec = g::make_spline_domain(blob);
  CHECK_NOTHROW(g::validate_domain(spec));
  CHECK(spec.contains({0.0, 0.0}));
  CHECK_FALSE(spec.contains({2.0, 0.0}));
}

TEST_CASE("disk mesh: quality, area and curvature total") {
  auto spec = g::make_gallery_domain("disk", {{"r", 1.0}});
  auto mesh = g::mesh_domain(spec, 0.08);
  CHECK_NOTHROW(g::validate_mesh(mesh, spec));
  CHECK(mesh.min_angle_degrees() >= 20.0);
  CHECK(mesh.max_interior_edge_length() <= 0.08 * 1.6);
  CHECK(mesh.area() == doctest::Approx(kPi).epsilon(0.01));
  auto curv = g::sample_curvature(mesh, spec);
  CHECK(curv.total == doctest::Approx(2 * kPi).epsilon(1e-10));
  auto st = g::geometry_stats(mesh, spec, curv);
  CHECK(st.convex);
  CHECK_FALSE(st.corner_flag);
  CHECK(st.in_radius == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(st.perimeter == doctest::Approx(2 * kPi).epsilon(1e-3));
}

TEST_CASE("peanut mesh resolves the neck and is not convex") {
  auto spec = g::make_gallery_domain("peanut", {{"d", 0.8}});
  auto mesh = g::mesh_domain(spec, 0.06);
  CHECK_NOTHROW(g::validate_mesh(mesh, spec));
  CHECK(mesh.min_angle_degrees() >= 20.0);
  auto curv = g::sample_curvature(mesh, spec);
  CHECK(std::abs(curv.total - 2 * kPi) <= 1e-2 * 2 * kPi);
  auto st = g::geometry_stats(mesh, spec, curv);
  CHECK_FALSE(st.convex);
  CHECK(st.gamma_min < -50.0);
}

TEST_CASE("rectangle mesh carries a corner flag and no curvature") {
  auto spec = g::make_gallery_domain("rectangle", {{"lx", kPi}, {"ly", 1.0}});
  CHECK(spec.has_corners());
  auto mesh = g::mesh_domain(spec, 0.1);
  CHECK(mesh.area() == doctest::Approx(kPi).epsilon(1e-12));
  auto st = g::geometry_stats(mesh, spec);
  CHECK(st.corner_flag);
  CHECK(st.gamma_min == doctest::Approx(0.0));
}

TEST_CASE("refinement, scaling and text round trip") {
  auto spec = g::make_gallery_domain("ellipse", {{"a", 2.0}, {"b", 1.0}});
  auto mesh = g::mesh_domain(spec, 0.15);
  std::vector<std::array<int, 2>> parents;
  auto fine = g::refine_uniform(mesh, spec, &parents);
  CHECK(fine.num_triangles() == 4 * mesh.num_triangles());
  CHECK(fine.num_vertices() == mesh.num_vertices() + static_cast<int>(parents.size()));
  CHECK_NOTHROW(g::validate_mesh(fine, spec));
  CHECK(std::abs(fine.area() - 2 * kPi) < std::abs(mesh.area() - 2 * kPi));

  auto big = g::scale_mesh(mesh, 3.0);
  CHECK(big.area() == doctest::Approx(9.0 * mesh.area()).epsilon(1e-13));
  CHECK_NOTHROW(g::validate_mesh(big, spec.scaled(3.0)));

  std::stringstream ss;
  g::write_mesh(ss, mesh);
  auto back = g::read_mesh(ss);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  CHECK(back.num_triangles() == mesh.num_triangles());
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());
  CHECK((back.vertices[5] - mesh.vertices[5]).norm() == 0.0);
}

TEST_CASE("mesh validation catches foreign meshes") {
  auto disk = g::make_gallery_domain("disk", {{"r", 1.0}});
  auto ellipse = g::make_gallery_domain("ellipse", {{"a", 2.0}, {"b", 1.0}});
  auto mesh = g::mesh_domain(ellipse, 0.2);
  CHECK_THROWS_AS(g::validate_mesh(mesh, disk), MeshingError);
  auto flipped = mesh;
  std::swap(flipped.triangles[0][0], flipped.triangles[0][1]);
  CHECK_THROWS_AS(g::validate_mesh(flipped, ellipse), MeshingError);
}
