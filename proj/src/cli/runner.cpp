#include "pattern_gauge/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/fem/fields.hpp"
#include "pattern_gauge/spectral/operators.hpp"
#include "pattern_gauge/verify/report.hpp"

namespace pattern_gauge::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& rel) {
    fs::path p = fs::path(dir_) / rel;
    fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    files_.push_back(rel);
    return os;
  }
  void text(const std::string& rel, const std::string& content) { open(rel) << content; }
  void field(const std::string& rel, const geometry::Mesh& mesh, const fem::FieldVector& v) {
    auto os = open(rel);
    fem::write_field_csv(os, mesh, v);
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

json to_json(const geometry::GeometryStats& s) {
  return {{"area", s.area},
          {"perimeter", s.perimeter},
          {"in_radius", s.in_radius},
          {"in_radius_resolution", s.in_radius_resolution},
          {"gamma_min", s.gamma_min},
          {"gauss_bonnet_total", s.gauss_bonnet_total},
          {"gauss_bonnet_error", std::abs(s.gauss_bonnet_total - 2.0 * 3.14159265358979323846)},
          {"convex", s.convex},
          {"corner_flag", s.corner_flag},
          {"tol_convex", s.tol_convex}};
}

json to_json(const verify::CheckOutcome& o) {
  json j = {{"id", o.id},
            {"state", o.state},
            {"lhs", o.lhs},
            {"rhs", o.rhs},
            {"margin", o.margin},
            {"tolerance", o.tolerance},
            {"pass", o.pass},
            {"severity", verify::to_string(o.severity)},
            {"status", o.status},
            {"provenance", o.provenance},
            {"notes", o.notes},
            {"values", o.values}};
  if (!o.interpretation.empty()) j["interpretation"] = o.interpretation;
  return j;
}

json to_json(const verify::FlatnessResult& f) {
  return {{"id", f.id},          {"state", f.state},     {"operator", f.op},
          {"method", f.method},  {"a", f.a},             {"e", {f.ex, f.ey}},
          {"angle", f.angle},    {"ratio", f.ratio},     {"bound", f.bound},
          {"projection", f.projection}};
}

json to_json(const verify::StateSummary& s) {
  return {{"label", s.label},
          {"supplied", s.supplied},
          {"residual_norm", s.residual_norm},
          {"residual_dual_norm", s.residual_dual_norm},
          {"certified", s.certified},
          {"osc", s.osc},
          {"pattern", s.pattern},
          {"stable", s.stable},
          {"morse_index", s.morse_index},
          {"lambda_0", s.lambda0},
          {"lambda_gamma", s.lambda_gamma},
          {"method", s.method},
          {"steps", s.steps},
          {"escapes", s.escapes},
          {"newton_ok", s.newton_ok},
          {"notes", s.notes}};
}

json mesh_json(const verify::ProblemContext& ctx, const DomainConfig& dc) {
  const auto& m = ctx.mesh();
  json j = {{"h", ctx.h()},
            {"vertices", m.num_vertices()},
            {"triangles", m.num_triangles()},
            {"boundary_edges", static_cast<int>(m.boundary_edges.size())},
            {"min_angle_deg", m.min_angle_degrees()},
            {"max_edge", m.max_edge_length()},
            {"source", dc.mesh_file.empty() ? "generated" : "file"}};
  return j;
}

json domain_json(const verify::ProblemContext& ctx) {
  const auto& s = ctx.spec();
  return {{"id", s.gallery_id.empty() ? std::string("spline") : s.gallery_id},
          {"params", s.params},
          {"loops", static_cast<int>(s.loops.size())},
          {"diameter", s.diameter()}};
}

struct Rejected {
  std::string label;
  std::string reason;
  double residual = 0.0;
};

struct Pipeline {
  std::vector<verify::StateInput> states;
  std::vector<Rejected> rejected;
  verify::VerificationReport report;
  std::vector<verify::StateAnalysis> analyses;
  verify::CheckBatch perturbation;
  std::map<std::string, double> timing;
};

std::unique_ptr<verify::ProblemContext> make_context(const ScenarioConfig& cfg) {
  auto spec = build_domain(cfg.domain);
  if (!cfg.domain.mesh_file.empty()) {
    std::ifstream in(cfg.domain.mesh_file);
    if (!in) throw ConfigError("$.domain.mesh_file: cannot open '" + cfg.domain.mesh_file + "'");
    geometry::Mesh mesh = geometry::read_mesh(in);
    geometry::validate_mesh(mesh, spec);
    if (!(mesh.h_target > 0.0)) mesh.h_target = mesh.max_edge_length();
    return std::make_unique<verify::ProblemContext>(spec, std::move(mesh));
  }
  return std::make_unique<verify::ProblemContext>(spec, cfg.mesh.h, cfg.mesh.options);
}

std::string state_kind_label(const semilinear::InitialData& d) { return d.kind; }

Pipeline run_pipeline(const ScenarioConfig& cfg, const verify::ProblemContext& ctx,
                      const semilinear::Nonlinearity& f, std::ostream& log) {
  Pipeline p;
  auto t0 = Clock::now();
  const auto initial = resolve_initial(cfg);
  const double span = f.root_span();
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const std::string label = "init" + std::to_string(i) + "." + state_kind_label(initial[i]);
    try {
      auto res = semilinear::find_stable_state(ctx.ops(), f, semilinear::make_initial_data(ctx.mesh(), initial[i]),
                                               cfg.search);
      const auto& s = res.state;
      if (!(s.residual_norm <= cfg.verify.certify_tol)) {
        p.rejected.push_back({label, "residual above the certificate tolerance", s.residual_norm});
        log << "  " << label << ": rejected (residual " << s.residual_norm << ")\n";
        continue;
      }
      bool duplicate = false;
      for (auto& prev : p.states) {
        if (prev.supplied) continue;
        if ((prev.u - s.u).cwiseAbs().maxCoeff() <= 1e-6 * span) {
          prev.notes.push_back("also reached from " + label);
          duplicate = true;
          break;
        }
      }
      log << "  " << label << ": " << (s.pattern ? "pattern" : "constant") << " residual " << s.residual_norm
          << " lambda_0 " << res.lambda0 << (duplicate ? " (duplicate)" : "") << "\n";
      if (duplicate) continue;
      verify::StateInput in;
      in.label = label;
      in.u = s.u;
      in.method = s.method;
      in.steps = s.trace.steps;
      in.escapes = res.escapes;
      in.newton_ok = res.newton_ok;
      in.notes = res.notes;
      p.states.push_back(std::move(in));
    } catch (const Error& e) {
      p.rejected.push_back({label, e.what(), 0.0});
      log << "  " << label << ": rejected (" << e.what() << ")\n";
    }
  }
  p.timing["search"] = seconds_since(t0);
  for (std::size_t i = 0; i < cfg.supplied.size(); ++i) {
    verify::StateInput in;
    in.label = "supplied" + std::to_string(i) + "." + state_kind_label(cfg.supplied[i]);
    in.supplied = true;
    in.descriptor = cfg.supplied[i];
    in.u = semilinear::make_initial_data(ctx.mesh(), cfg.supplied[i]);
    in.method = "supplied";
    p.states.push_back(std::move(in));
  }
  auto t1 = Clock::now();
  p.report = verify::verify_states(ctx, p.states, f, cfg.verify, cfg.checks, &p.analyses);
  p.timing["checks"] = seconds_since(t1);
  if (cfg.perturbation) {
    auto t2 = Clock::now();
    verify::PerturbationConfig pc = *cfg.perturbation;
    pc.initial = initial;
    p.perturbation = verify::check_perturbation_robustness(pc, f, cfg.verify);
    p.timing["perturbation"] = seconds_since(t2);
  }
  return p;
}

bool hard_pass(const verify::CheckBatch& b) {
  for (const auto& o : b.outcomes)
    if (o.severity == verify::Severity::hard && !o.pass) return false;
  return true;
}

json report_json(const ScenarioConfig& cfg, const verify::ProblemContext& ctx, const Pipeline& p) {
  const auto& r = p.report;
  json j;
  j["kind"] = "verify";
  j["version"] = r.version;
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  j["domain"] = domain_json(ctx);
  j["mesh"] = mesh_json(ctx, cfg.domain);
  j["geometry"] = to_json(r.stats);
  j["nonlinearity"] = {{"id", r.nonlinearity},
                       {"params", r.nonlinearity_params},
                       {"sup_fprime", r.sup_fprime},
                       {"sup_restricted", r.sup_restricted}};
  json mu = json::array();
  for (const auto& [a, vals] : r.mu) mu.push_back({{"a", a}, {"values", vals}});
  j["spectra"] = {{"mu_a_gamma", mu}, {"lambda2_neumann", r.lambda2_neumann}};
  j["states"] = json::array();
  for (const auto& s : r.states) j["states"].push_back(to_json(s));
  j["rejected_states"] = json::array();
  for (const auto& s : p.rejected)
    j["rejected_states"].push_back({{"label", s.label}, {"reason", s.reason}, {"residual_norm", s.residual}});
  j["checks"] = json::array();
  for (const auto& o : r.checks.outcomes) j["checks"].push_back(to_json(o));
  for (const auto& o : p.perturbation.outcomes) j["checks"].push_back(to_json(o));
  j["skipped"] = json::array();
  for (const auto& s : r.checks.skipped)
    j["skipped"].push_back({{"id", s.id}, {"state", s.state}, {"reason", s.reason}});
  j["flatness"] = json::array();
  for (const auto& f : r.checks.flatness) j["flatness"].push_back(to_json(f));

  int hard_fail = 0, soft_flag = 0;
  for (const auto* b : {&r.checks, &p.perturbation})
    for (const auto& o : b->outcomes) {
      if (o.pass) continue;
      if (o.severity == verify::Severity::hard) ++hard_fail;
      else if (o.severity == verify::Severity::soft) ++soft_flag;
    }
  j["summary"] = {{"text", r.summary},
                  {"stable_pattern_found", r.stable_pattern_found},
                  {"hard_pass", hard_fail == 0},
                  {"hard_failures", hard_fail},
                  {"soft_flags", soft_flag},
                  {"checks_evaluated", static_cast<int>(r.checks.outcomes.size() + p.perturbation.outcomes.size())}};
  return j;
}

void write_state_fields(Output& out, const verify::ProblemContext& ctx, const Pipeline& p) {
  const auto& mesh = ctx.mesh();
  for (const auto& an : p.analyses) {
    const std::string base = "fields/" + an.state->label + ".";
    fem::FieldVector mag = (an.gx.array().square() + an.gy.array().square()).sqrt().matrix();
    out.field(base + "u.csv", mesh, an.state->u);
    out.field(base + "v1.csv", mesh, an.gx);
    out.field(base + "v2.csv", mesh, an.gy);
    out.field(base + "grad_abs.csv", mesh, mag);
    out.field(base + "phi_F_0.csv", mesh, an.lambda0.vectors.front());
    out.field(base + "phi_F_gamma.csv", mesh, an.lambda_gamma.vectors.front());
  }
}

void write_json(Output& out, const std::string& rel, const json& j) { out.text(rel, j.dump(2) + "\n"); }

void finish_artifacts(Output& out, json& report, const std::map<std::string, double>& timing) {
  json t = timing;
  write_json(out, "timing.json", t);
  std::vector<std::string> files = out.files();
  files.push_back("report.json");
  std::sort(files.begin(), files.end());
  report["artifacts"] = files;
  write_json(out, "report.json", report);
}

semilinear::Nonlinearity require_nonlinearity(const ScenarioConfig& cfg) {
  if (!cfg.nonlinearity) throw ConfigError("$.nonlinearity: required field is missing");
  return build_nonlinearity(*cfg.nonlinearity);
}

struct SweepRow {
  double param = 0.0;
  double mu_gamma = 0.0;
  std::vector<double> mu_a;
  bool has_states = false;
  bool pattern_found = false;
  double lambda0 = 0.0, lambda_gamma = 0.0;
  bool pass = true;
  int hard_failures = 0;
  double scaling_error = 0.0;
};

}  // namespace

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov) {
  if (ov.out) cfg.output.dir = *ov.out;
  if (ov.h) {
    if (!(*ov.h > 0.0)) throw ConfigError("--h: must be > 0");
    cfg.mesh.h = *ov.h;
    if (cfg.perturbation) cfg.perturbation->h = *ov.h;
  }
  if (ov.seed) cfg.seed = *ov.seed;
}

RunResult run_verify(const ScenarioConfig& cfg, std::ostream& log) {
  auto t0 = Clock::now();
  const auto f = require_nonlinearity(cfg);
  auto ctx = make_context(cfg);
  log << "mesh: " << ctx->mesh().num_vertices() << " vertices, h = " << ctx->h() << "\n";
  std::map<std::string, double> timing{{"mesh", seconds_since(t0)}};
  Pipeline p = run_pipeline(cfg, *ctx, f, log);
  for (const auto& [k, v] : p.timing) timing[k] = v;

  Output out(cfg.output.dir);
  if (cfg.output.mesh) {
    auto os = out.open("mesh.txt");
    geometry::write_mesh(os, ctx->mesh());
  }
  if (cfg.output.fields) write_state_fields(out, *ctx, p);
  json report = report_json(cfg, *ctx, p);
  timing["total"] = seconds_since(t0);
  finish_artifacts(out, report, timing);

  RunResult r;
  r.dir = out.dir();
  r.files = report["artifacts"].get<std::vector<std::string>>();
  r.summary = p.report.summary;
  r.exit_code = hard_pass(p.report.checks) && hard_pass(p.perturbation) ? kExitPass : kExitCheckFailed;
  log << r.summary << "; " << report["summary"]["hard_failures"].get<int>() << " hard failure(s)\n";
  return r;
}

RunResult run_sweep(const ScenarioConfig& cfg, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("$.sweep: required for the sweep command");
  auto t0 = Clock::now();
  const auto& sw = *cfg.sweep;
  Output out(cfg.output.dir);
  json points = json::array();
  std::vector<SweepRow> rows;
  verify::CheckBatch sweep_checks;
  std::map<std::string, double> timing;

  std::unique_ptr<verify::ProblemContext> base;
  if (sw.axis == "eta" || sw.axis == "a") base = make_context(cfg);
  if (sw.axis == "epsilon" && (!cfg.nonlinearity || cfg.nonlinearity->id != "allen_cahn"))
    throw ConfigError("$.sweep.axis: epsilon sweeps need the allen_cahn nonlinearity");
  if (sw.axis == "d" && cfg.domain.gallery != "peanut")
    throw ConfigError("$.sweep.axis: d sweeps need the peanut gallery domain");

  for (std::size_t i = 0; i < sw.values.size(); ++i) {
    const double v = sw.values[i];
    auto tp = Clock::now();
    log << "sweep " << sw.axis << " = " << v << "\n";
    SweepRow row;
    row.param = v;
    if (sw.axis == "a") {
      const auto& mu = base->mu(v, cfg.verify.eig);
      row.mu_gamma = base->mu(1.0, cfg.verify.eig).first();
      row.mu_a = {mu.first()};
      points.push_back({{"param", v}, {"mu_a_gamma", mu.values}});
      rows.push_back(row);
      continue;
    }
    ScenarioConfig pc = cfg;
    std::unique_ptr<verify::ProblemContext> ctx;
    if (sw.axis == "epsilon") pc.nonlinearity->params["eps"] = v;
    if (sw.axis == "d") pc.domain.params["d"] = v;
    if (sw.axis == "eta") {
      if (!(v > 0.0)) throw ConfigError("$.sweep.values: eta must be > 0");
      ctx = std::make_unique<verify::ProblemContext>(base->spec().scaled(v), geometry::scale_mesh(base->mesh(), v));
    } else {
      ctx = make_context(pc);
    }
    row.mu_gamma = ctx->mu(1.0, pc.verify.eig).first();
    for (double a : pc.verify.a_grid) row.mu_a.push_back(ctx->mu(a, pc.verify.eig).first());
    if (sw.axis == "eta") {
      const double ref = base->mu(1.0, pc.verify.eig).first();
      const double gap = base->neumann_gap(pc.verify.eig);
      const std::string id = "sweep.scaling.eta=" + fmt(v);
      verify::CheckOutcome o;
      if (std::abs(ref) < 1e-6 * (1.0 + gap)) {
        row.scaling_error = std::abs(row.mu_gamma) * v * v;
        o = verify::make_outcome(id, row.scaling_error, verify::tol_eig(pc.verify, gap), 0.0);
        if (o.pass) o.status = "degenerate_consistent";
        o.notes.push_back("mu_gamma vanishes; scaled value compared with zero at eigen tolerance");
      } else {
        row.scaling_error = std::abs(row.mu_gamma * v * v - ref) / std::abs(ref);
        o = verify::make_outcome(id, row.scaling_error, 1e-10, 0.0);
      }
      o.values["mu_gamma"] = row.mu_gamma;
      o.values["mu_gamma_reference"] = ref;
      sweep_checks.outcomes.push_back(o);
    }
    json pj = {{"param", v}, {"mu_gamma", row.mu_gamma}};
    if (pc.nonlinearity) {
      const auto f = build_nonlinearity(*pc.nonlinearity);
      Pipeline p = run_pipeline(pc, *ctx, f, log);
      row.has_states = true;
      row.pattern_found = p.report.stable_pattern_found;
      const verify::StateSummary* primary = nullptr;
      for (const auto& s : p.report.states)
        if (!primary || (s.pattern && s.stable && !(primary->pattern && primary->stable))) primary = &s;
      if (primary) {
        row.lambda0 = primary->lambda0.front();
        row.lambda_gamma = primary->lambda_gamma.front();
      }
      row.pass = hard_pass(p.report.checks) && hard_pass(p.perturbation);
      json rj = report_json(pc, *ctx, p);
      row.hard_failures = rj["summary"]["hard_failures"].get<int>();
      pj["report"] = rj;
    }
    points.push_back(pj);
    rows.push_back(row);
    timing["point" + std::to_string(i)] = seconds_since(tp);
  }

  if (sw.axis == "epsilon") {
    std::vector<const SweepRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->param > b->param; });
    int violations = 0;
    bool seen = false;
    for (const auto* r : sorted) {
      if (seen && !r->pattern_found) ++violations;
      seen = seen || r->pattern_found;
    }
    auto o = verify::make_outcome("sweep.pattern_monotone", violations, 0.0, 0.0);
    o.notes.push_back("pattern_found must switch from false to true at most once as epsilon decreases");
    o.values["any_pattern"] = seen ? 1.0 : 0.0;
    sweep_checks.outcomes.push_back(o);
  }
  if (sw.axis == "a") {
    std::vector<const SweepRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->param < b->param; });
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < sorted.size(); ++i)
      worst = std::max(worst, sorted[i - 1]->mu_a[0] - sorted[i]->mu_a[0]);
    if (sorted.size() < 2) worst = -1.0;
    // Strict increase needs a non-negative curvature weight.
    const bool convex = base->stats().convex;
    auto o = verify::make_strict("sweep.mu_a_increasing", worst, 0.0, 1e-12, false,
                                 convex ? verify::Severity::hard : verify::Severity::info);
    if (!convex) o.notes.push_back("curvature changes sign; monotonicity in a is not implied");
    sweep_checks.outcomes.push_back(o);
  }

  {
    auto os = out.open("sweep.csv");
    os.precision(17);
    os << "param,mu_gamma";
    if (sw.axis == "a") os << ",mu_a_gamma";
    else
      for (double a : cfg.verify.a_grid) os << ",mu_a=" << a;
    os << ",pattern_found,lambda_0,lambda_gamma,hard_pass,hard_failures";
    if (sw.axis == "eta") os << ",scaling_error";
    os << "\n";
    for (const auto& r : rows) {
      os << r.param << ',' << r.mu_gamma;
      for (double m : r.mu_a) os << ',' << m;
      if (r.has_states)
        os << ',' << (r.pattern_found ? "true" : "false") << ',' << r.lambda0 << ',' << r.lambda_gamma;
      else
        os << ",,,";
      os << ',' << (r.pass ? "true" : "false") << ',' << r.hard_failures;
      if (sw.axis == "eta") os << ',' << r.scaling_error;
      os << "\n";
    }
  }

  bool pass = hard_pass(sweep_checks);
  for (const auto& r : rows) pass = pass && r.pass;
  json report;
  report["kind"] = "sweep";
  report["version"] = verify::kToolkitVersion;
  report["scenario"] = cfg.name;
  report["seed"] = cfg.seed;
  report["axis"] = sw.axis;
  report["values"] = sw.values;
  report["points"] = points;
  report["checks"] = json::array();
  for (const auto& o : sweep_checks.outcomes) report["checks"].push_back(to_json(o));
  int hard_fail = 0;
  for (const auto& o : sweep_checks.outcomes) hard_fail += o.severity == verify::Severity::hard && !o.pass;
  for (const auto& r : rows) hard_fail += r.hard_failures;
  std::string text;
  if (sw.axis == "epsilon" || sw.axis == "d") {
    int found = 0;
    for (const auto& r : rows) found += r.pattern_found;
    text = std::to_string(found) + " of " + std::to_string(rows.size()) + " sweep points have a stable pattern";
  } else {
    text = std::to_string(rows.size()) + " sweep points";
  }
  report["summary"] = {{"text", text}, {"hard_pass", pass}, {"hard_failures", hard_fail}};
  timing["total"] = seconds_since(t0);
  finish_artifacts(out, report, timing);

  RunResult r;
  r.dir = out.dir();
  r.files = report["artifacts"].get<std::vector<std::string>>();
  r.summary = text;
  r.exit_code = pass ? kExitPass : kExitCheckFailed;
  log << text << "\n";
  return r;
}

RunResult run_mesh(const ScenarioConfig& cfg, std::ostream& log) {
  auto t0 = Clock::now();
  auto ctx = make_context(cfg);
  Output out(cfg.output.dir);
  {
    auto os = out.open("mesh.txt");
    geometry::write_mesh(os, ctx->mesh());
  }
  json report;
  report["kind"] = "mesh";
  report["version"] = verify::kToolkitVersion;
  report["scenario"] = cfg.name;
  report["seed"] = cfg.seed;
  report["domain"] = domain_json(*ctx);
  report["mesh"] = mesh_json(*ctx, cfg.domain);
  report["geometry"] = to_json(ctx->stats());
  report["summary"] = {{"text", "mesh written"}, {"hard_pass", true}, {"hard_failures", 0}};
  finish_artifacts(out, report, {{"total", seconds_since(t0)}});
  log << "mesh: " << ctx->mesh().num_vertices() << " vertices, " << ctx->mesh().num_triangles() << " triangles\n";
  RunResult r;
  r.dir = out.dir();
  r.files = report["artifacts"].get<std::vector<std::string>>();
  r.summary = "mesh written";
  return r;
}

RunResult run_spectrum(const ScenarioConfig& cfg, std::ostream& log) {
  auto t0 = Clock::now();
  auto ctx = make_context(cfg);
  Output out(cfg.output.dir);
  std::optional<semilinear::Nonlinearity> f;
  if (cfg.nonlinearity) f = build_nonlinearity(*cfg.nonlinearity);
  verify::CheckBatch checks;
  if (cfg.checks.count("convex_bounds")) checks = verify::check_convex_bounds(*ctx, f ? &*f : nullptr, cfg.verify);
  json mu = json::array();
  for (double a : cfg.verify.a_grid) {
    const auto& r = ctx->mu(a, cfg.verify.eig);
    mu.push_back({{"a", a}, {"values", r.values}, {"residuals", r.residuals}, {"method", r.method},
                  {"degenerate", r.degenerate}});
    if (cfg.output.fields) out.field("fields/phi_G_a_gamma.a=" + fmt(a) + ".csv", ctx->mesh(), r.vectors.front());
  }
  if (cfg.output.mesh) {
    auto os = out.open("mesh.txt");
    geometry::write_mesh(os, ctx->mesh());
  }
  json report;
  report["kind"] = "spectrum";
  report["version"] = verify::kToolkitVersion;
  report["scenario"] = cfg.name;
  report["seed"] = cfg.seed;
  report["domain"] = domain_json(*ctx);
  report["mesh"] = mesh_json(*ctx, cfg.domain);
  report["geometry"] = to_json(ctx->stats());
  report["spectra"] = {{"mu_a_gamma", mu}, {"lambda2_neumann", ctx->neumann_gap(cfg.verify.eig)}};
  report["checks"] = json::array();
  for (const auto& o : checks.outcomes) report["checks"].push_back(to_json(o));
  report["skipped"] = json::array();
  for (const auto& s : checks.skipped) report["skipped"].push_back({{"id", s.id}, {"state", s.state}, {"reason", s.reason}});
  int hard_fail = 0;
  for (const auto& o : checks.outcomes) hard_fail += o.severity == verify::Severity::hard && !o.pass;
  report["summary"] = {{"text", "spectra computed"}, {"hard_pass", hard_fail == 0}, {"hard_failures", hard_fail}};
  finish_artifacts(out, report, {{"total", seconds_since(t0)}});
  log << "mu_gamma = " << ctx->mu(1.0, cfg.verify.eig).first() << ", lambda_2^N = " << ctx->neumann_gap(cfg.verify.eig)
      << "\n";
  RunResult r;
  r.dir = out.dir();
  r.files = report["artifacts"].get<std::vector<std::string>>();
  r.summary = "spectra computed";
  r.exit_code = hard_fail == 0 ? kExitPass : kExitCheckFailed;
  return r;
}

int dispatch(const std::string& command, const std::string& config_path, const RunOverrides& ov, std::ostream& log,
             std::ostream& err) {
  try {
    ScenarioConfig cfg = load_scenario(config_path);
    apply_overrides(cfg, ov);
    RunResult r;
    if (command == "verify") r = run_verify(cfg, log);
    else if (command == "sweep") r = run_sweep(cfg, log);
    else if (command == "mesh") r = run_mesh(cfg, log);
    else if (command == "spectrum") r = run_spectrum(cfg, log);
    else throw ConfigError("unknown command '" + command + "'");
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace pattern_gauge::cli
