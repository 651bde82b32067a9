#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"
#include "pattern_gauge/semilinear/nonlinearity.hpp"
#include "pattern_gauge/spectral/eigensolver.hpp"
#include "pattern_gauge/spectral/operators.hpp"

namespace g = pattern_gauge::geometry;
namespace fem = pattern_gauge::fem;
namespace sp = pattern_gauge::spectral;
namespace sl = pattern_gauge::semilinear;
constexpr double kPi = std::numbers::pi;

// Disk(1) oracles: mu_gamma = k^2 with J0(k) = k J1(k); lambda_2^N = j'_{1,1}^2.
constexpr double kMuDisk = 1.5769927308086125;
constexpr double kJp11 = 1.841183781340659;

namespace {

struct Setup {
  g::Mesh mesh;
  g::CurvatureField curv;
  fem::OperatorBundle ops;
};

Setup make(const std::string& id, std::map<std::string, double> params, double h) {
  Setup s;
  auto spec = g::make_gallery_domain(id, params);
  s.mesh = g::mesh_domain(spec, h);
  s.curv = g::sample_curvature(s.mesh, spec);
  s.ops = fem::assemble(s.mesh, s.curv);
  return s;
}

}  // namespace

TEST_CASE("disk Robin-curvature and Neumann oracles") {
  auto s = make("disk", {{"r", 1.0}}, 0.05);
  auto mu = sp::mu_curvature(s.ops, 1.0);
  CHECK(mu.first() == doctest::Approx(kMuDisk).epsilon(0.01));
  CHECK(mu.residuals.front() < 1e-8);
  CHECK(sp::neumann_gap(s.ops) == doctest::Approx(kJp11 * kJp11).epsilon(0.01));

  // Frozen values of the lowest eigenvalue of K + a B on the disk.
  CHECK(sp::mu_curvature(s.ops, 0.5).first() == doctest::Approx(0.8850492539943065).epsilon(0.01));
  CHECK(sp::mu_curvature(s.ops, 2.0).first() == doctest::Approx(2.558237764130199).epsilon(0.01));
  CHECK(sp::mu_curvature(s.ops, 4.0).first() == doctest::Approx(3.6407646728469767).epsilon(0.01));
}

TEST_CASE("mu converges at second order on the disk") {
  std::vector<double> err;
  for (double h : {0.16, 0.08, 0.04}) err.push_back(std::abs(sp::mu_curvature(make("disk", {{"r", 1.0}}, h).ops, 1.0).first() - kMuDisk));
  CHECK(std::log2(err[0] / err[1]) >= 1.6);
  CHECK(std::log2(err[1] / err[2]) >= 1.6);
}

TEST_CASE("rectangle Neumann gap") {
  auto s = make("rectangle", {{"lx", kPi}, {"ly", 1.0}}, 0.05);
  CHECK(sp::neumann_gap(s.ops) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(sp::mu_curvature(s.ops, 1.0).first()) < 1e-8);
}

TEST_CASE("dense and shift-invert agree") {
  auto s = make("peanut", {{"d", 0.3}}, 0.1);
  sp::SolverOptions dense, krylov;
  dense.method = sp::Method::dense;
  krylov.method = sp::Method::shift_invert;
  sp::OperatorSpec op{s.ops.K + s.ops.B, s.ops.M, 3};
  auto a = sp::smallest_eigs(op, dense), b = sp::smallest_eigs(op, krylov);
  REQUIRE(a.values.size() == 3);
  REQUIRE(b.values.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-8));
  // M-orthonormal eigenvectors
  CHECK(b.vectors[0].dot(s.ops.M * b.vectors[0]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(b.vectors[0].dot(s.ops.M * b.vectors[1])) < 1e-8);
  CHECK(sp::gershgorin_lower_bound(op.A, op.M) <= a.values[0] + 1e-12);
}

TEST_CASE("strongly negative pencils on the thin-neck peanut") {
  auto s = make("peanut", {{"d", 0.8}}, 0.06);
  auto m1 = sp::mu_curvature(s.ops, 1.0);
  auto m8 = sp::mu_curvature(s.ops, 8.0);
  CHECK(m1.first() < 0.0);
  CHECK(m8.first() < m1.first());
  CHECK(m8.residuals.front() < 1e-6);
}

TEST_CASE("mu is increasing in a on a convex domain") {
  auto s = make("ellipse", {{"a", 2.0}, {"b", 1.0}}, 0.1);
  double prev = -1.0;
  for (double a : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    double m = sp::mu_curvature(s.ops, a).first();
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("linearization of f(u) = u at a constant shifts the spectrum by one") {
  auto s = make("disk", {{"r", 1.0}}, 0.1);
  auto f = sl::Nonlinearity::linear(1.0);
  fem::FieldVector u = fem::FieldVector::Zero(s.mesh.num_vertices());
  auto l0 = sp::lambda_stability(s.ops, u, f, sp::Variant::neumann);
  CHECK(l0.first() == doctest::Approx(-1.0).epsilon(1e-9));
  auto lg = sp::lambda_stability(s.ops, u, f, sp::Variant::robin_curvature);
  CHECK(lg.first() == doctest::Approx(sp::mu_curvature(s.ops, 1.0).first() - 1.0).epsilon(1e-8));
}
