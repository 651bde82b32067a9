#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/semilinear/initial_data.hpp"
#include "pattern_gauge/verify/report.hpp"

namespace g = pattern_gauge::geometry;
namespace sl = pattern_gauge::semilinear;
namespace v = pattern_gauge::verify;
constexpr double kPi = std::numbers::pi;

namespace {

const v::CheckOutcome* find(const v::CheckBatch& b, const std::string& id, const std::string& state = "") {
  for (const auto& o : b.outcomes)
    if (o.id == id && (state.empty() || o.state == state)) return &o;
  return nullptr;
}

bool skipped(const v::CheckBatch& b, const std::string& id) {
  for (const auto& s : b.skipped)
    if (s.id == id) return true;
  return false;
}

v::StateInput cosine_state(const v::ProblemContext& ctx) {
  sl::InitialData d;
  d.kind = "cosine";
  v::StateInput in;
  in.label = "cos";
  in.supplied = true;
  in.descriptor = d;
  in.u = sl::make_initial_data(ctx.mesh(), d);
  return in;
}

std::set<std::string> all_families() {
  const auto& f = v::check_families();
  return {f.begin(), f.end()};
}

}  // namespace

TEST_CASE("flatness ratio and angle sweep") {
  Eigen::Matrix2d G;
  G << 3.0, 0.0, 0.0, 1.0;
  CHECK(v::flatness_ratio(G, 0.0) == doctest::Approx(0.75));
  CHECK(v::flatness_ratio(G, kPi / 2) == doctest::Approx(0.25));
  const double th = v::sweep_max_angle(G, 720);
  CHECK(std::min(th, kPi - th) < 1e-7);

  G << 2.0, 1.0, 1.0, 2.0;
  CHECK(v::flatness_ratio(G, v::sweep_max_angle(G, 37)) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(v::sweep_max_angle(G, 37) == doctest::Approx(kPi / 4).epsilon(1e-6));
  CHECK(v::flatness_ratio(Eigen::Matrix2d::Zero(), 0.3) == 0.0);
}

TEST_CASE("outcome construction") {
  auto ok = v::make_outcome("x", 1.0, 2.0, 0.0);
  CHECK(ok.pass);
  CHECK(ok.margin == 1.0);
  CHECK(ok.status == "pass");
  CHECK_FALSE(v::make_outcome("x", 2.0, 1.0, 0.5).pass);
  CHECK(v::make_outcome("x", 2.0, 1.0, 1.0).pass);

  // Strict: equality fails unless both sides vanish or equality is admissible.
  CHECK_FALSE(v::make_strict("s", 1.0, 1.0, 1e-6).pass);
  CHECK(v::make_strict("s", 1.0, 1.0 + 1e-3, 1e-6).pass);
  auto zero = v::make_strict("s", 1e-9, -1e-9, 1e-6);
  CHECK(zero.pass);
  CHECK(zero.status == "degenerate_consistent");
  auto eq = v::make_strict("s", 2.0, 2.0, 1e-6, true);
  CHECK(eq.pass);
  CHECK(eq.status == "degenerate_consistent");

  v::VerifyConfig cfg;
  CHECK(v::tol_eig(cfg, -3.0) == doctest::Approx(4e-6));
  CHECK(v::savo_bound(1.0, 1.0, 1.0) == doctest::Approx(0.711599560857999).epsilon(1e-14));
  CHECK_THROWS_AS(v::savo_bound(1.0, 1.0, 0.0), pattern_gauge::ParameterError);
}

TEST_CASE("domain-level bounds on the disk") {
  v::ProblemContext ctx(g::make_gallery_domain("disk", {{"r", 1.0}}), 0.08);
  v::VerifyConfig cfg;
  auto b = v::check_convex_bounds(ctx, nullptr, cfg);
  for (double a : {1.0, 2.0, 4.0}) {
    std::ostringstream id;
    id << "eq17.savo_bound.a=" << a;
    auto* o = find(b, id.str());
    REQUIRE(o);
    CHECK(o->pass);
    CHECK(o->margin > 0.0);
  }
  auto* gap = find(b, "eq19.spectral_gap");
  REQUIRE(gap);
  CHECK(gap->pass);
  CHECK(gap->interpretation == "spectral_gap");
  CHECK(gap->values.count("inverse_gap"));
  for (const char* id : {"shrink.scaling.eta=0.5", "shrink.scaling.eta=2"}) {
    auto* o = find(b, id);
    REQUIRE(o);
    CHECK(o->pass);
  }
}

TEST_CASE("non-convex domains skip the convex-only bounds") {
  v::ProblemContext ctx(g::make_gallery_domain("peanut", {{"d", 0.8}}), 0.08);
  v::VerifyConfig cfg;
  auto b = v::check_convex_bounds(ctx, nullptr, cfg);
  CHECK(skipped(b, "eq17.savo_bound.a=1"));
  CHECK(find(b, "eq17.savo_bound.a=1") == nullptr);
  auto* gap = find(b, "eq19.spectral_gap");
  REQUIRE(gap);
  CHECK(gap->pass);
}

TEST_CASE("cos x on the rectangle is an unstable pattern with flat gradient") {
  v::ProblemContext ctx(g::make_gallery_domain("rectangle", {{"lx", kPi}, {"ly", 1.0}}), 0.05);
  v::VerifyConfig cfg;
  cfg.supplied_certify_tol = 1e-2;
  std::vector<v::StateInput> states{cosine_state(ctx)};
  std::vector<v::StateAnalysis> an;
  auto rep = v::verify_states(ctx, states, sl::Nonlinearity::linear(1.0), cfg, all_families(), &an);
  REQUIRE(an.size() == 1);
  CHECK(an[0].pattern);
  CHECK(an[0].lambda0.first() == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK_FALSE(an[0].stable);
  CHECK(an[0].morse_index == 1);
  CHECK(rep.hard_checks_pass());
  CHECK_FALSE(rep.stable_pattern_found);

  bool saw_eq24 = false;
  for (const auto& f : rep.checks.flatness)
    if (f.op == "F_gamma" && f.method == "eigenfunction-projection") {
      saw_eq24 = true;
      CHECK(f.ratio == doctest::Approx(1.0).epsilon(1e-6));
    }
  CHECK(saw_eq24);
  auto* cac = find(rep.checks, "eq13.cacciopoli");
  REQUIRE(cac);
  CHECK(cac->pass);
  CHECK(cac->lhs >= -1e-10);
  CHECK(cac->rhs == doctest::Approx(kPi / 2).epsilon(5e-3));
  for (const auto& o : rep.checks.outcomes) {
    CHECK(o.margin == doctest::Approx(o.rhs - o.lhs));
    CHECK(o.pass == (o.margin >= -o.tolerance));
  }
}

TEST_CASE("uncertified states get only the residual family") {
  v::ProblemContext ctx(g::make_gallery_domain("rectangle", {{"lx", kPi}, {"ly", 1.0}}), 0.1);
  v::VerifyConfig cfg;  // 1e-8 certificate: the interpolated cosine is only O(h^2) accurate
  std::vector<v::StateInput> states{cosine_state(ctx)};
  auto rep = v::verify_states(ctx, states, sl::Nonlinearity::linear(1.0), cfg, all_families());
  auto* res = find(rep.checks, "solution.residual_certificate");
  REQUIRE(res);
  CHECK_FALSE(res->pass);
  CHECK(find(rep.checks, "thm1.lambda_gamma_negative") == nullptr);
  CHECK(skipped(rep.checks, "theorem1"));
  CHECK_FALSE(rep.hard_checks_pass());
}

TEST_CASE("checks are pure and reject unknown families") {
  v::ProblemContext ctx(g::make_gallery_domain("disk", {{"r", 1.0}}), 0.12);
  v::VerifyConfig cfg;
  cfg.refinement_band = false;
  v::StateInput c;
  c.label = "one";
  c.u = Eigen::VectorXd::Ones(ctx.mesh().num_vertices());
  auto f = sl::Nonlinearity::allen_cahn(0.3);
  auto r1 = v::verify_states(ctx, {c}, f, cfg, all_families());
  auto r2 = v::verify_states(ctx, {c}, f, cfg, all_families());
  REQUIRE(r1.checks.outcomes.size() == r2.checks.outcomes.size());
  for (std::size_t i = 0; i < r1.checks.outcomes.size(); ++i) {
    CHECK(r1.checks.outcomes[i].id == r2.checks.outcomes[i].id);
    CHECK(r1.checks.outcomes[i].lhs == r2.checks.outcomes[i].lhs);
    CHECK(r1.checks.outcomes[i].rhs == r2.checks.outcomes[i].rhs);
  }
  auto* l10 = find(r1.checks, "lemma10.sum_F_gamma");
  REQUIRE(l10);
  CHECK(std::abs(l10->lhs) <= 1e-10);
  CHECK(l10->pass);
  CHECK_THROWS_AS(v::verify_states(ctx, {c}, f, cfg, {"residual", "bogus"}), pattern_gauge::ParameterError);
}
