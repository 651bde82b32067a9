#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/fem/fields.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"

namespace g = pattern_gauge::geometry;
namespace fem = pattern_gauge::fem;
constexpr double kPi = std::numbers::pi;

namespace {

struct Setup {
  g::DomainSpec spec;
  g::Mesh mesh;
  g::CurvatureField curv;
  fem::OperatorBundle ops;
};

Setup make(const std::string& id, std::map<std::string, double> params, double h) {
  Setup s;
  s.spec = g::make_gallery_domain(id, params);
  s.mesh = g::mesh_domain(s.spec, h);
  s.curv = g::sample_curvature(s.mesh, s.spec);
  s.ops = fem::assemble(s.mesh, s.curv);
  return s;
}

fem::FieldVector nodal(const g::Mesh& mesh, double (*fn)(double, double)) {
  fem::FieldVector v(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) v[i] = fn(mesh.vertices[i].x(), mesh.vertices[i].y());
  return v;
}

}  // namespace

TEST_CASE("operator identities on the disk") {
  auto s = make("disk", {{"r", 1.0}}, 0.1);
  const int n = s.mesh.num_vertices();
  fem::FieldVector one = fem::FieldVector::Ones(n);
  CHECK((s.ops.K * one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.dot(s.ops.M * one) == doctest::Approx(s.mesh.area()).epsilon(1e-12));
  CHECK(s.ops.lumped_mass().sum() == doctest::Approx(s.mesh.area()).epsilon(1e-12));
  // 1' B 1 is the boundary integral of gamma.
  CHECK(one.dot(s.ops.B * one) == doctest::Approx(2 * kPi).epsilon(1e-10));
  fem::SparseSymMatrix diff = s.ops.K - fem::SparseSymMatrix(s.ops.K.transpose());
  CHECK(diff.norm() < 1e-12);

  auto two = fem::assemble(s.mesh, s.curv, 2.0);
  CHECK((two.B - 2.0 * s.ops.B).norm() < 1e-12);

  fem::SparseSymMatrix m1 = fem::coefficient_mass(s.ops, one);
  CHECK((m1 - s.ops.M).norm() < 1e-12);
}

TEST_CASE("stiffness reproduces the Dirichlet energy of linear fields") {
  auto s = make("ellipse", {{"a", 2.0}, {"b", 1.0}}, 0.12);
  auto u = nodal(s.mesh, [](double x, double y) { return 3.0 * x - 2.0 * y; });
  CHECK(u.dot(s.ops.K * u) == doctest::Approx(13.0 * s.mesh.area()).epsilon(1e-12));
}

TEST_CASE("quadrature of nonlinear integrands") {
  auto s = make("disk", {{"r", 1.0}}, 0.05);
  auto u = nodal(s.mesh, [](double x, double) { return x; });
  // Integral of x^2 over the disk is pi / 4; P1 interpolation error is O(h^2).
  CHECK(fem::integrate(s.ops, u, [](double v) { return v * v; }) == doctest::Approx(kPi / 4).epsilon(5e-3));
  fem::FieldVector load = fem::load_vector(s.ops, u, [](double v) { return v * v; });
  CHECK(load.sum() == doctest::Approx(fem::integrate(s.ops, u, [](double v) { return v * v; })).epsilon(1e-12));
}

TEST_CASE("gradient recovery reproduces quadratics") {
  auto s = make("disk", {{"r", 1.0}}, 0.1);
  auto u = nodal(s.mesh, [](double x, double y) { return x * x + 0.5 * x * y - y * y + x; });
  fem::FieldVector gx, gy;
  fem::recover_gradient(s.mesh, u, gx, gy);
  double err = 0.0;
  for (int i = 0; i < s.mesh.num_vertices(); ++i) {
    const auto& p = s.mesh.vertices[i];
    err = std::max(err, std::abs(gx[i] - (2 * p.x() + 0.5 * p.y() + 1)));
    err = std::max(err, std::abs(gy[i] - (0.5 * p.x() - 2 * p.y())));
  }
  CHECK(err < 1e-9);
  auto hess = fem::hessian_recovery(s.mesh, u);
  CHECK(hess.xx.mean() == doctest::Approx(2.0).epsilon(0.1));
  CHECK(hess.yy.mean() == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("recovered gradient converges on a smooth field") {
  auto err_at = [](double h) {
    auto s = make("disk", {{"r", 1.0}}, h);
    auto u = nodal(s.mesh, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
    fem::FieldVector gx, gy;
    fem::recover_gradient(s.mesh, u, gx, gy);
    fem::FieldVector ex(gx.size()), ey(gy.size());
    for (int i = 0; i < gx.size(); ++i) {
      const auto& p = s.mesh.vertices[i];
      ex[i] = gx[i] - 2 * std::cos(2 * p.x()) * std::cos(p.y());
      ey[i] = gy[i] + std::sin(2 * p.x()) * std::sin(p.y());
    }
    return std::sqrt(ex.dot(s.ops.M * ex) + ey.dot(s.ops.M * ey));
  };
  const double e1 = err_at(0.1), e2 = err_at(0.05);
  CHECK(std::log2(e1 / e2) >= 1.5);
}

TEST_CASE("field norms of cos x on the rectangle") {
  auto s = make("rectangle", {{"lx", kPi}, {"ly", 1.0}}, 0.05);
  auto u = nodal(s.mesh, [](double x, double) { return std::cos(x); });
  auto nm = fem::norms_and_integrals(s.mesh, s.ops, u, [](double v) { return v; });
  CHECK(nm.grad_sq == doctest::Approx(kPi / 2).epsilon(5e-3));
  CHECK(nm.l2_sq == doctest::Approx(kPi / 2).epsilon(5e-3));
  CHECK(nm.f_int == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(nm.osc == doctest::Approx(2.0).epsilon(1e-12));
  // For cos x, |grad u| = |sin x| and D^2 u has the single entry -cos x.
  CHECK(nm.hessian_sq == doctest::Approx(kPi / 2).epsilon(2e-2));
  CHECK(nm.grad_abs_grad_sq == doctest::Approx(kPi / 2).epsilon(2e-2));
}

TEST_CASE("field csv layout") {
  auto s = make("disk", {{"r", 1.0}}, 0.3);
  fem::FieldVector v = fem::FieldVector::LinSpaced(s.mesh.num_vertices(), 0.0, 1.0);
  std::ostringstream os;
  fem::write_field_csv(os, s.mesh, v);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "vertex_index,x,y,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == s.mesh.num_vertices());
  fem::FieldVector wrong(3);
  CHECK_THROWS_AS(fem::write_field_csv(os, s.mesh, wrong), pattern_gauge::MismatchError);
}
