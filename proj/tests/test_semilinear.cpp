#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"
#include "pattern_gauge/semilinear/initial_data.hpp"
#include "pattern_gauge/semilinear/nonlinearity.hpp"
#include "pattern_gauge/semilinear/solvers.hpp"

namespace g = pattern_gauge::geometry;
namespace fem = pattern_gauge::fem;
namespace sl = pattern_gauge::semilinear;
using pattern_gauge::ParameterError;

namespace {

struct Setup {
  g::Mesh mesh;
  fem::OperatorBundle ops;
};

Setup make(const std::string& id, std::map<std::string, double> params, double h) {
  Setup s;
  auto spec = g::make_gallery_domain(id, params);
  s.mesh = g::mesh_domain(spec, h);
  s.ops = fem::assemble(s.mesh, g::sample_curvature(s.mesh, spec));
  return s;
}

}  // namespace

TEST_CASE("Allen-Cahn nonlinearity") {
  auto f = sl::Nonlinearity::allen_cahn(0.5);
  CHECK(f.f(1.0) == 0.0);
  CHECK(f.f(-1.0) == 0.0);
  CHECK(f.fprime(0.0) == doctest::Approx(4.0));
  CHECK(f.fprime(1.0) == doctest::Approx(-8.0));
  CHECK(f.F(1.0) == doctest::Approx(1.0));  // (u^2/2 - u^4/4) / eps^2 at u = 1
  REQUIRE(f.roots().size() == 3);
  CHECK(f.root_span() == doctest::Approx(2.0));
  CHECK(*f.sup_fprime_global() == doctest::Approx(4.0));
  // F' = f by central differences
  for (double u : {-0.7, 0.2, 1.3}) CHECK((f.F(u + 1e-5) - f.F(u - 1e-5)) / 2e-5 == doctest::Approx(f.f(u)).epsilon(1e-8));
}

TEST_CASE("nonlinearity factory and sup f'") {
  CHECK_THROWS_AS(sl::make_nonlinearity("allen_cahn", {{"epsilon", 0.1}}), ParameterError);
  CHECK_THROWS_AS(sl::make_nonlinearity("allen_cahn", {{"eps", 0.0}}), ParameterError);
  CHECK_THROWS_AS(sl::make_nonlinearity("sine", {}), ParameterError);
  auto lin = sl::make_nonlinearity("linear", {{"q", 2.0}});
  CHECK(sl::sup_fprime(lin).value == doctest::Approx(2.0));
  // -(u+1) u (u-1) has f' maximal at the inflection point u = 0; the global value wins over an interval.
  auto bi = sl::make_nonlinearity("bistable", {{"p", -1.0}, {"q", 0.0}, {"r", 1.0}});
  auto sup = sl::sup_fprime(bi, std::make_pair(0.5, 1.0));
  CHECK_FALSE(sup.restricted);
  CHECK(sup.value == doctest::Approx(1.0));
  CHECK_THROWS_AS(sl::make_nonlinearity("bistable", {{"p", 1.0}, {"q", 0.0}, {"r", 2.0}}), ParameterError);
}

TEST_CASE("initial data descriptors") {
  auto s = make("disk", {{"r", 1.0}}, 0.15);
  sl::InitialData step;
  step.kind = "step";
  step.width = 0.1;
  auto u = sl::make_initial_data(s.mesh, step);
  for (int i = 0; i < s.mesh.num_vertices(); ++i) {
    const double x = s.mesh.vertices[i].x();
    CHECK(u[i] == doctest::Approx(std::tanh(x / 0.1)));
  }
  sl::InitialData rnd;
  rnd.kind = "random";
  rnd.seed = 42;
  auto r1 = sl::make_initial_data(s.mesh, rnd), r2 = sl::make_initial_data(s.mesh, rnd);
  CHECK((r1 - r2).norm() == 0.0);
  CHECK(r1.cwiseAbs().maxCoeff() <= 1.0);
  rnd.seed = 43;
  CHECK((sl::make_initial_data(s.mesh, rnd) - r1).norm() > 0.0);
  sl::InitialData bad;
  bad.kind = "gaussian";
  CHECK_THROWS_AS(sl::make_initial_data(s.mesh, bad), ParameterError);
}

TEST_CASE("gradient flow decreases the lumped energy and reaches a constant on the disk") {
  auto s = make("disk", {{"r", 1.0}}, 0.1);
  auto f = sl::Nonlinearity::allen_cahn(0.3);
  sl::InitialData rnd;
  rnd.kind = "random";
  rnd.seed = 7;
  auto flow = sl::gradient_flow(s.ops, f, sl::make_initial_data(s.mesh, rnd));
  CHECK(flow.converged);
  for (std::size_t i = 1; i < flow.trace.energy.size(); ++i)
    CHECK(flow.trace.energy[i] <= flow.trace.energy[i - 1] + 1e-12 * (1.0 + std::abs(flow.trace.energy[i - 1])));
  CHECK_FALSE(flow.pattern);
  CHECK(std::abs(std::abs(flow.u.mean()) - 1.0) < 1e-6);
}

TEST_CASE("Newton converges quadratically from a nearby state") {
  auto s = make("disk", {{"r", 1.0}}, 0.1);
  auto f = sl::Nonlinearity::allen_cahn(0.3);
  fem::FieldVector u0 = fem::FieldVector::Constant(s.mesh.num_vertices(), 0.9);
  auto st = sl::newton_refine(s.ops, f, u0);
  CHECK(st.converged);
  CHECK(st.residual_norm < 1e-10);
  CHECK((st.u.array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK(st.trace.quadratic_tail);
}

TEST_CASE("stable-state search finds a pattern on the thin-neck peanut") {
  auto s = make("peanut", {{"d", 0.8}}, 0.05);
  auto f = sl::Nonlinearity::allen_cahn(0.15);
  sl::InitialData step;
  step.kind = "step";
  auto res = sl::find_stable_state(s.ops, f, sl::make_initial_data(s.mesh, step));
  CHECK(res.state.pattern);
  CHECK(res.state.residual_norm <= 1e-8);
  CHECK(res.lambda0 >= -1e-4);
  CHECK(sl::is_pattern(f, res.state.u));
  CHECK(sl::residual_norm(s.ops, f, res.state.u) == doctest::Approx(res.state.residual_norm));
}

TEST_CASE("dual-norm residual of interpolated cos x decays at second order") {
  auto lin = sl::Nonlinearity::linear(1.0);
  std::vector<double> dual, nodal;
  for (double h : {0.1, 0.05}) {
    auto s = make("rectangle", {{"lx", std::numbers::pi}, {"ly", 1.0}}, h);
    fem::FieldVector u(s.mesh.num_vertices());
    for (int i = 0; i < u.size(); ++i) u[i] = std::cos(s.mesh.vertices[i].x());
    dual.push_back(sl::residual_dual_norm(s.ops, lin, u));
    nodal.push_back(sl::residual_norm(s.ops, lin, u));
  }
  CHECK(std::log2(dual[0] / dual[1]) >= 1.8);
  CHECK(std::log2(nodal[0] / nodal[1]) < 1.5);  // the nodal norm is only first order here
  auto s = make("disk", {{"r", 1.0}}, 0.15);
  CHECK(sl::residual_dual_norm(s.ops, sl::Nonlinearity::allen_cahn(0.3), fem::FieldVector::Ones(s.mesh.num_vertices())) <=
        1e-12);
}
