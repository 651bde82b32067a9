// Acceptance harness: one PASS/FAIL line per criterion, exit 0 only when every line passes.
// Scenario-level criteria go through the same entry points as the CLI and read back the
// written report.json, so they exercise serialization as well.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pattern_gauge/cli/runner.hpp"
#include "pattern_gauge/error.hpp"
#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"
#include "pattern_gauge/spectral/operators.hpp"
#include "pattern_gauge/verify/report.hpp"

namespace fs = std::filesystem;
namespace g = pattern_gauge::geometry;
namespace fem = pattern_gauge::fem;
namespace sp = pattern_gauge::spectral;
namespace v = pattern_gauge::verify;
namespace cli = pattern_gauge::cli;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMuDisk = 1.5769927308086125;  // k^2 with J0(k) = k J1(k)
constexpr double kJp11 = 1.841183781340659;

fs::path g_out;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

struct Gallery {
  std::string id;
  std::map<std::string, double> params;
};

const std::vector<Gallery>& gallery() {
  static const std::vector<Gallery> all{{"disk", {{"r", 1.0}}},
                                        {"ellipse", {{"a", 2.0}, {"b", 1.0}}},
                                        {"perturbed_disk", {{"r", 1.0}, {"delta", 0.1}, {"k", 5.0}}},
                                        {"peanut", {{"d", 0.3}}},
                                        {"peanut", {{"d", 0.8}}},
                                        {"annulus", {{"r_in", 0.5}, {"r_out", 1.0}}},
                                        {"rectangle", {{"lx", kPi}, {"ly", 1.0}}}};
  return all;
}

std::string label(const Gallery& d) {
  std::ostringstream os;
  os << d.id << "(";
  bool first = true;
  for (const auto& [k, val] : d.params) {
    os << (first ? "" : ",") << k << "=" << val;
    first = false;
  }
  os << ")";
  return os.str();
}

cli::ScenarioConfig scenario(const std::string& name, const std::string& out) {
  auto cfg = cli::load_scenario(std::string(PATTERN_GAUGE_SCENARIO_DIR) + "/" + name + ".json");
  cfg.output.dir = (g_out / out).string();
  return cfg;
}

json read_report(const cli::RunResult& r) {
  std::ifstream in(fs::path(r.dir) / "report.json");
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json* find_check(const json& report, const std::string& id, const std::string& state) {
  for (const auto& c : report["checks"])
    if (c["id"] == id && c["state"] == state) return &c;
  return nullptr;
}

// Every stable, certified pattern in a verify report (or in the per-point reports of a sweep).
std::vector<std::pair<const json*, const json*>> stable_patterns(const json& report) {
  std::vector<std::pair<const json*, const json*>> out;
  auto scan = [&](const json& rep) {
    for (const auto& s : rep["states"])
      if (s["pattern"] && s["stable"] && s["certified"]) out.emplace_back(&rep, &s);
  };
  if (report["kind"] == "sweep") {
    for (const auto& p : report["points"])
      if (p.contains("report")) scan(p["report"]);
  } else {
    scan(report);
  }
  return out;
}

std::vector<const json*> verify_reports(const json& report) {
  std::vector<const json*> out;
  if (report["kind"] == "sweep") {
    for (const auto& p : report["points"])
      if (p.contains("report")) out.push_back(&p["report"]);
  } else {
    out.push_back(&report);
  }
  return out;
}

// Reports gathered by the scenario criteria and reused by the cross-cutting ones.
json g_matano_sweep, g_disk_control, g_disk_control_eps015, g_cosx;

// 1. Gauss-Bonnet on the curved gallery domains.
void criterion_gauss_bonnet(Verdict& vd) {
  double worst = 0.0;
  for (const auto& d : gallery()) {
    if (d.id == "annulus" || d.id == "rectangle") continue;
    auto spec = g::make_gallery_domain(d.id, d.params);
    auto mesh = g::mesh_domain(spec, 0.03);
    auto fine = g::refine_uniform(mesh, spec);
    const double e1 = std::abs(g::sample_curvature(mesh, spec).total - 2 * kPi);
    const double e2 = std::abs(g::sample_curvature(fine, spec).total - 2 * kPi);
    worst = std::max(worst, e1);
    vd.detail << " " << label(d) << ":" << e1 << "->" << e2;
    vd.require(e1 <= 1e-2 * 2 * kPi, label(d) + " total within 1% of 2 pi");
    vd.require(e2 <= e1 + 1e-12, label(d) + " error does not grow under h -> h/2");
  }
  vd.detail << " worst=" << worst;
}

// 2. Disk Robin-curvature oracle and convergence order.
void criterion_disk_robin(Verdict& vd) {
  std::vector<double> hs{0.08, 0.04, 0.02}, err;
  double mu_fine = 0.0;
  for (double h : hs) {
    auto spec = g::make_gallery_domain("disk", {{"r", 1.0}});
    auto mesh = g::mesh_domain(spec, h);
    auto ops = fem::assemble(mesh, g::sample_curvature(mesh, spec));
    mu_fine = sp::mu_curvature(ops, 1.0).first();
    err.push_back(std::abs(mu_fine - kMuDisk));
  }
  // Least-squares slope of log err against log h.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = std::log(hs[i]), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  vd.detail << " mu(h=0.02)=" << mu_fine << " rel_err=" << err.back() / kMuDisk << " order=" << order;
  vd.require(err.back() <= 0.01 * kMuDisk, "within 1% at h=0.02");
  vd.require(order >= 1.8, "observed order >= 1.8");
}

// 3. Neumann gap oracles.
void criterion_neumann_gap(Verdict& vd) {
  auto gap = [](const std::string& id, std::map<std::string, double> p) {
    auto spec = g::make_gallery_domain(id, p);
    auto mesh = g::mesh_domain(spec, 0.03);
    return sp::neumann_gap(fem::assemble(mesh, g::sample_curvature(mesh, spec)));
  };
  const double disk = gap("disk", {{"r", 1.0}}), rect = gap("rectangle", {{"lx", kPi}, {"ly", 1.0}});
  const double d_rel = std::abs(disk - kJp11 * kJp11) / (kJp11 * kJp11), r_rel = std::abs(rect - 1.0);
  vd.detail << " disk=" << disk << " (rel " << d_rel << ") rectangle=" << rect << " (rel " << r_rel << ")";
  vd.require(d_rel <= 0.01, "disk within 1% of j'_{1,1}^2");
  vd.require(r_rel <= 1e-3, "rectangle within 0.1% of 1");
}

// 4. Lower bound for mu_{a gamma} on convex domains, with the in-radius error bar applied.
void criterion_savo(Verdict& vd) {
  for (const auto& d : {gallery()[0], gallery()[1]}) {
    v::ProblemContext ctx(g::make_gallery_domain(d.id, d.params), 0.03);
    v::VerifyConfig cfg;
    cfg.a_grid = {1.0, 2.0, 4.0};
    cfg.eta_grid.clear();
    auto b = v::check_convex_bounds(ctx, nullptr, cfg);
    for (double a : cfg.a_grid) {
      std::ostringstream id;
      id << "eq17.savo_bound.a=" << a;
      const v::CheckOutcome* o = nullptr;
      for (const auto& c : b.outcomes)
        if (c.id == id.str()) o = &c;
      vd.require(o != nullptr, label(d) + " " + id.str() + " evaluated");
      if (!o) continue;
      vd.detail << " " << label(d) << ".a=" << a << ":margin=" << o->margin;
      vd.require(o->pass && o->margin > 0.0, label(d) + " " + id.str() + " positive margin");
    }
  }
}

// 5. Spectral-gap reading of the upper bound on every gallery domain.
void criterion_spectral_gap(Verdict& vd) {
  double worst = 1e300;
  for (const auto& d : gallery()) {
    v::ProblemContext ctx(g::make_gallery_domain(d.id, d.params), 0.03);
    v::VerifyConfig cfg;
    cfg.eta_grid.clear();
    auto b = v::check_convex_bounds(ctx, nullptr, cfg);
    const v::CheckOutcome* o = nullptr;
    for (const auto& c : b.outcomes)
      if (c.id == "eq19.spectral_gap") o = &c;
    vd.require(o != nullptr, label(d) + " evaluated");
    if (!o) continue;
    worst = std::min(worst, o->margin);
    vd.require(o->pass && o->lhs < o->rhs, label(d) + " mu_gamma < lambda_2^N");
    vd.require(o->interpretation == "spectral_gap", label(d) + " interpretation flag");
  }
  vd.detail << " domains=" << gallery().size() << " smallest margin=" << worst;
}

// 6. Symmetry breaking on the thin-neck peanut as eps decreases.
void criterion_matano(Verdict& vd) {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream log;
  auto r = cli::run_sweep(scenario("peanut_eps_sweep", "c6_sweep"), log);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  g_matano_sweep = read_report(r);
  const json& rep = g_matano_sweep;

  const json* mono = nullptr;
  for (const auto& c : rep["checks"])
    if (c["id"] == "sweep.pattern_monotone") mono = &c;
  vd.require(mono && (*mono)["pass"].get<bool>(), "pattern_found monotone in decreasing eps");

  vd.detail << " pattern_found:";
  for (const auto& p : rep["points"]) vd.detail << " " << p["param"].get<double>() << "=" << p["report"]["summary"]["stable_pattern_found"].get<bool>();

  int n = 0;
  for (auto [report, s] : stable_patterns(rep)) {
    ++n;
    const std::string st = (*s)["label"];
    const std::string at = " eps=" + std::to_string((*report)["nonlinearity"]["params"]["eps"].get<double>());
    vd.require((*s)["residual_norm"].get<double>() <= 1e-8, "residual <= 1e-8" + at);
    vd.require((*s)["lambda_0"][0].get<double>() >= -1e-4, "lambda_0 >= -1e-4" + at);
    vd.require((*s)["lambda_gamma"][0].get<double>() < -1e-4, "lambda_gamma < -1e-4" + at);
    const json* e13 = find_check(*report, "eq13.cacciopoli", st);
    vd.require(e13 && (*e13)["pass"].get<bool>() && (*e13)["margin"].get<double>() > 0.0,
               "Cacciopoli strict with positive margin" + at);
    for (const char* a : {"1", "1.5", "2", "4", "8"}) {
      const json* l12 = find_check(*report, std::string("lemma12.a=") + a, st);
      vd.require(l12 && (*l12)["pass"].get<bool>(), std::string("breakdown identity a=") + a + at);
    }
  }
  vd.require(n > 0, "at least one stable pattern found");
  vd.require(secs <= 600.0, "runtime <= 10 min");
  vd.detail << "; patterns=" << n << " runtime=" << secs << "s";

  // The switch itself sits above the mandated eps list on this domain; show it with a wider sweep.
  auto rw = cli::run_sweep(scenario("peanut_eps_transition", "c6_transition"), log);
  json wide = read_report(rw);
  double last_without = -1.0, first_with = -1.0;
  for (const auto& p : wide["points"]) {
    const bool found = p["report"]["summary"]["stable_pattern_found"];
    const double eps = p["param"];
    if (!found) last_without = eps;
    if (found && first_with < 0.0) first_with = eps;
  }
  vd.detail << "; wider sweep: no pattern at eps=" << last_without << ", pattern at eps=" << first_with;
}

// 7. Convex control: the disk admits no stable pattern.
void criterion_convex_control(Verdict& vd) {
  std::ostringstream log;
  for (double eps : {0.3, 0.15}) {
    auto cfg = scenario("disk_allen_cahn", eps == 0.3 ? "c7_disk_eps0.3" : "c7_disk_eps0.15");
    cfg.nonlinearity->params["eps"] = eps;
    cfg.mesh.h = 0.03;
    auto r = cli::run_verify(cfg, log);
    json rep = read_report(r);
    (eps == 0.3 ? g_disk_control : g_disk_control_eps015) = rep;
    int constants = 0;
    for (const auto& s : rep["states"]) constants += !s["pattern"].get<bool>();
    const auto inits = cfg.initial.size();
    vd.detail << " eps=" << eps << ": inits=" << inits << " states=" << rep["states"].size()
              << " rejected=" << rep["rejected_states"].size() << " '" << rep["summary"]["text"].get<std::string>()
              << "'";
    vd.require(inits == 8, "8 seeded initial conditions");
    vd.require(rep["rejected_states"].empty(), "every flow certified");
    vd.require(constants == static_cast<int>(rep["states"].size()), "all flows reach constants");
    vd.require(!rep["summary"]["stable_pattern_found"].get<bool>(), "no stable pattern");
    vd.require(r.exit_code == cli::kExitPass, "hard checks pass");
    for (const std::string id : {"eq17.savo_bound.a=1", "eq19.spectral_gap"}) {
      const json* c = find_check(rep, id, "");
      vd.require(c && (*c)["pass"].get<bool>(), id + " passes");
    }
  }
}

// 8. cos x regression on the rectangle.
void criterion_cosx(Verdict& vd) {
  std::ostringstream log;
  auto cfg = scenario("rectangle_cosx", "c8_cosx");
  auto r = cli::run_verify(cfg, log);
  g_cosx = read_report(r);
  const json& rep = g_cosx;
  if (rep["states"].size() != 1) {
    vd.require(false, "exactly one supplied state");
    return;
  }
  const json& s = rep["states"][0];
  const std::string st = s["label"];

  // Residual of the interpolated cos x under refinement, in the discrete dual norm; the nodal
  // Euclidean norm of K u - M u only decays like h on an unstructured mesh.
  const std::vector<double> hs{0.1, 0.05, 0.025};
  std::vector<double> res;
  for (double h : hs) {
    auto c = cfg;
    c.mesh.h = h;
    c.verify.refinement_band = false;
    c.checks = {"residual"};
    c.output.dir = (g_out / ("c8_cosx_h" + std::to_string(h))).string();
    c.output.fields = false;
    res.push_back(read_report(cli::run_verify(c, log))["states"][0]["residual_dual_norm"].get<double>());
  }
  const double order = std::log2(res.front() / res.back()) / 2.0;
  const double l0 = s["lambda_0"][0];
  double ratio = -1.0;
  for (const auto& f : rep["flatness"])
    if (f["operator"] == "F_gamma" && f["method"] == "eigenfunction-projection") ratio = f["ratio"];
  const json* e13 = find_check(rep, "eq13.cacciopoli", st);

  vd.detail << " dual residual(h=0.1,0.05,0.025)=" << res[0] << "," << res[1] << "," << res[2] << " order=" << order << " lambda_0=" << l0
            << " eq24_ratio=" << ratio;
  vd.require(order >= 1.8, "residual O(h^2)");
  vd.require(std::abs(l0 + 1.0) <= 1e-3, "lambda_0 = -1 +- 1e-3");
  vd.require(std::abs(ratio - 1.0) <= 1e-6, "flatness ratio 1 +- 1e-6");
  vd.require(e13 && (*e13)["pass"].get<bool>(), "Cacciopoli holds");
  if (e13) vd.detail << " cacciopoli lhs=" << (*e13)["lhs"].get<double>() << " rhs=" << (*e13)["rhs"].get<double>();
  vd.require(r.exit_code == cli::kExitPass, "hard checks pass");
}

// 9. Scaling identity on geometrically scaled meshes.
void criterion_scaling(Verdict& vd) {
  std::ostringstream log;
  for (const char* name : {"disk_eta_sweep", "peanut_eta_sweep"}) {
    auto r = cli::run_sweep(scenario(name, std::string("c9_") + name), log);
    json rep = read_report(r);
    double worst = 0.0;
    int n = 0;
    for (const auto& c : rep["checks"]) {
      const std::string id = c["id"];
      if (id.rfind("sweep.scaling.eta=", 0) != 0) continue;
      ++n;
      worst = std::max(worst, c["lhs"].get<double>());
      vd.require(c["pass"].get<bool>() && c["status"] == "pass" && c["lhs"].get<double>() <= 1e-10,
                 std::string(name) + " " + id + " relative error <= 1e-10");
    }
    vd.require(n == 3, std::string(name) + " three eta values");
    vd.detail << " " << name << ": worst rel=" << worst;
  }
}

// 10. Flatness consistency on every computed pattern.
void criterion_flatness(Verdict& vd) {
  int patterns = 0, checked = 0;
  std::vector<const json*> reports = verify_reports(g_matano_sweep);
  reports.push_back(&g_cosx);
  for (const json* rep : reports) {
    for (const auto& s : (*rep)["states"]) {
      if (!s["pattern"].get<bool>() || !s["certified"].get<bool>()) continue;
      ++patterns;
      const std::string st = s["label"];
      bool saw_sweep = false;
      for (const auto& c : (*rep)["checks"]) {
        if (c["state"] != st) continue;
        const std::string id = c["id"];
        const bool consistency = id.rfind("flatness.sweep_consistency.", 0) == 0;
        const bool bound = id.rfind("prop6.", 0) == 0 || id.rfind("eq24.", 0) == 0 || id.rfind("eq25.", 0) == 0;
        if (!consistency && !bound) continue;
        ++checked;
        saw_sweep = saw_sweep || consistency;
        vd.require(c["margin"].get<double>() >= -c["tolerance"].get<double>(), st + " " + id);
      }
      vd.require(saw_sweep, st + " has sweep-consistency outcomes");
    }
  }
  vd.require(patterns > 0, "patterns available");
  vd.detail << " patterns=" << patterns << " outcomes=" << checked;
}

// 11. Vector-field sum identity on every certified steady state.
void criterion_lemma_identities(Verdict& vd) {
  std::vector<const json*> reports = verify_reports(g_matano_sweep);
  for (const json* r : {&g_disk_control, &g_disk_control_eps015, &g_cosx}) reports.push_back(r);
  int states = 0, constants = 0;
  double worst_const = 0.0;
  for (const json* rep : reports) {
    for (const auto& s : (*rep)["states"]) {
      if (!s["certified"].get<bool>()) continue;
      ++states;
      const std::string st = s["label"];
      const json* c = find_check(*rep, "lemma10.sum_F_gamma", st);
      vd.require(c && (*c)["pass"].get<bool>(), st + " sum <= tol_recovery");
      if (c && !s["pattern"].get<bool>()) {
        ++constants;
        worst_const = std::max(worst_const, std::abs((*c)["lhs"].get<double>()));
        vd.require(std::abs((*c)["lhs"].get<double>()) <= 1e-10, st + " equals 0 +- 1e-10 for a constant");
      }
    }
  }
  vd.detail << " certified states=" << states << " constants=" << constants << " worst |sum| on constants=" << worst_const;
}

// 12. Determinism of the criterion-6 scenario.
void criterion_determinism(Verdict& vd) {
  std::ostringstream log;
  auto r = cli::run_sweep(scenario("peanut_eps_sweep", "c12_sweep_rerun"), log);
  const std::string a = slurp(g_out / "c6_sweep" / "report.json"), b = slurp(fs::path(r.dir) / "report.json");
  vd.detail << " bytes=" << a.size() << "," << b.size();
  vd.require(!a.empty() && a == b, "identical report.json");
}

}  // namespace

int main(int argc, char** argv) {
  g_out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "pattern_gauge_acceptance";
  fs::create_directories(g_out);

  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"AC01 gauss_bonnet", criterion_gauss_bonnet},
      {"AC02 disk_robin_oracle", criterion_disk_robin},
      {"AC03 neumann_gap_oracle", criterion_neumann_gap},
      {"AC04 savo_lower_bound", criterion_savo},
      {"AC05 spectral_gap_upper_bound", criterion_spectral_gap},
      {"AC06 matano_witness", criterion_matano},
      {"AC07 convexity_control", criterion_convex_control},
      {"AC08 cosx_regression", criterion_cosx},
      {"AC09 scaling_identity", criterion_scaling},
      {"AC10 flatness_consistency", criterion_flatness},
      {"AC11 lemma_identities", criterion_lemma_identities},
      {"AC12 determinism", criterion_determinism},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict vd;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(vd);
    } catch (const std::exception& e) {
      vd.pass = false;
      vd.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !vd.pass;
    std::cout << (vd.pass ? "PASS " : "FAIL ") << name << " (" << std::fixed;
    std::cout.precision(1);
    std::cout << secs << "s)";
    std::cout.unsetf(std::ios::floatfield);
    std::cout.precision(6);
    std::cout << vd.detail.str() << std::endl;
  }
  std::cout << (failed ? "FAIL" : "PASS") << " acceptance: " << criteria.size() - failed << "/" << criteria.size()
            << " criteria" << std::endl;
  return failed ? 1 : 0;
}
