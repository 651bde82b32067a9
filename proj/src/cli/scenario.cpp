#include "pattern_gauge/cli/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/verify/report.hpp"

namespace pattern_gauge::cli {

namespace {

using nlohmann::json;

// A JSON object whose keys must all be consumed with a known name.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(child_path(it.key()) + ": unknown key '" + it.key() + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string child_path(const std::string& key) const { return path_ + "." + key; }
  const json& raw(const char* key) const { return j_.at(key); }
  Node object(const char* key) const { return Node(j_.at(key), child_path(key)); }

  double number(const char* key, double def) const { return has(key) ? number(key) : def; }
  double number(const char* key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(child_path(key) + ": expected a number");
    return v.get<double>();
  }
  int integer(const char* key, int def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child_path(key) + ": expected an integer");
    return v.get<int>();
  }
  std::uint64_t u64(const char* key, std::uint64_t def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(child_path(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const char* key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(child_path(key) + ": expected true or false");
    return v.get<bool>();
  }
  std::string string(const char* key, const std::string& def) const { return has(key) ? string(key) : def; }
  std::string string(const char* key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(child_path(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child_path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(child_path(key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::map<std::string, double> number_map(const char* key) const {
    std::map<std::string, double> out;
    if (!has(key)) return out;
    Node m = object(key);
    for (auto it = m.j_.begin(); it != m.j_.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError(m.child_path(it.key()) + ": expected a number");
      out[it.key()] = it.value().get<double>();
    }
    return out;
  }
  std::vector<Node> objects(const char* key) const {
    need(key);
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child_path(key) + ": expected an array of objects");
    std::vector<Node> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], child_path(key) + "[" + std::to_string(i) + "]");
    return out;
  }
  const std::string& path() const { return path_; }

 private:
  void need(const char* key) const {
    if (!has(key)) throw ConfigError(child_path(key) + ": required field is missing");
  }
  const json& j_;
  std::string path_;
};

std::vector<geometry::Vec2> points(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() < 4) throw ConfigError(path + ": expected an array of at least 4 [x, y] points");
  std::vector<geometry::Vec2> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected [x, y]");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

double parse_axis(const Node& n) {
  if (!n.has("axis")) return 0.0;
  const json& v = n.raw("axis");
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (v == "x") return 0.0;
    if (v == "y") return 0.5 * 3.14159265358979323846;
  }
  throw ConfigError(n.child_path("axis") + ": expected \"x\", \"y\" or an angle in radians");
}

semilinear::InitialData parse_state(const Node& n, bool& seed_given) {
  semilinear::InitialData d;
  d.kind = n.string("kind");
  seed_given = false;
  if (d.kind == "constant") {
    n.allow({"kind", "value"});
    d.value = n.number("value");
  } else if (d.kind == "step") {
    n.allow({"kind", "axis", "smoothing_width", "offset"});
    d.angle = parse_axis(n);
    d.width = n.number("smoothing_width", 0.1);
    d.offset = n.number("offset", 0.0);
  } else if (d.kind == "random") {
    n.allow({"kind", "seed", "amplitude", "around"});
    seed_given = n.has("seed");
    d.seed = n.u64("seed", 0);
    d.amplitude = n.number("amplitude", 1.0);
    d.value = n.number("around", 0.0);
  } else if (d.kind == "cosine") {
    n.allow({"kind", "axis", "k", "amplitude", "phase"});
    d.angle = parse_axis(n);
    d.wavenumber = n.number("k", 1.0);
    d.amplitude = n.number("amplitude", 1.0);
    d.phase = n.number("phase", 0.0);
  } else {
    throw ConfigError(n.child_path("kind") + ": unknown kind '" + d.kind + "' (constant, step, random, cosine)");
  }
  return d;
}

spectral::SolverOptions parse_eig(const Node& n) {
  n.allow({"method", "dense_limit", "tol", "max_restarts", "basis_blocks", "seed"});
  spectral::SolverOptions o;
  std::string m = n.string("method", "auto");
  if (m == "auto") o.method = spectral::Method::automatic;
  else if (m == "dense") o.method = spectral::Method::dense;
  else if (m == "shift_invert") o.method = spectral::Method::shift_invert;
  else throw ConfigError(n.child_path("method") + ": expected auto, dense or shift_invert");
  o.dense_limit = n.integer("dense_limit", o.dense_limit);
  o.tol = n.number("tol", o.tol);
  o.max_restarts = n.integer("max_restarts", o.max_restarts);
  o.basis_blocks = n.integer("basis_blocks", o.basis_blocks);
  o.seed = n.u64("seed", o.seed);
  return o;
}

void parse_solver(const Node& n, semilinear::SearchConfig& s) {
  n.allow({"flow", "newton", "eig", "saddle_tol", "max_escapes", "escape_amplitude"});
  if (n.has("flow")) {
    Node f = n.object("flow");
    f.allow({"tau0", "grow", "shrink", "grow_after", "tol", "max_steps", "tau_max", "tau_min", "confine"});
    s.flow.tau0 = f.number("tau0", s.flow.tau0);
    s.flow.grow = f.number("grow", s.flow.grow);
    s.flow.shrink = f.number("shrink", s.flow.shrink);
    s.flow.grow_after = f.integer("grow_after", s.flow.grow_after);
    s.flow.tol = f.number("tol", s.flow.tol);
    s.flow.max_steps = f.integer("max_steps", s.flow.max_steps);
    s.flow.tau_max = f.number("tau_max", s.flow.tau_max);
    s.flow.tau_min = f.number("tau_min", s.flow.tau_min);
    s.flow.confine = f.boolean("confine", s.flow.confine);
  }
  if (n.has("newton")) {
    Node f = n.object("newton");
    f.allow({"tol", "max_steps", "damping_min"});
    s.newton.tol = f.number("tol", s.newton.tol);
    s.newton.max_steps = f.integer("max_steps", s.newton.max_steps);
    s.newton.damping_min = f.number("damping_min", s.newton.damping_min);
  }
  if (n.has("eig")) s.eig = parse_eig(n.object("eig"));
  s.saddle_tol = n.number("saddle_tol", s.saddle_tol);
  s.max_escapes = n.integer("max_escapes", s.max_escapes);
  s.escape_amplitude = n.number("escape_amplitude", s.escape_amplitude);
}

void parse_verify(const Node& n, ScenarioConfig& cfg) {
  n.allow({"a_grid", "eta_grid", "certify_tol", "supplied_certify_tol", "tol_eig_rel", "recovery_constant",
           "sweep_points", "refinement_band", "sup_interval", "checks"});
  auto& v = cfg.verify;
  if (n.has("a_grid")) v.a_grid = n.numbers("a_grid");
  for (double a : v.a_grid)
    if (!(a >= 1.0)) throw ConfigError(n.child_path("a_grid") + ": entries must be >= 1");
  if (n.has("eta_grid")) v.eta_grid = n.numbers("eta_grid");
  for (double e : v.eta_grid)
    if (!(e > 0.0)) throw ConfigError(n.child_path("eta_grid") + ": entries must be > 0");
  v.certify_tol = n.number("certify_tol", v.certify_tol);
  v.supplied_certify_tol = n.number("supplied_certify_tol", v.supplied_certify_tol);
  v.tol_eig_rel = n.number("tol_eig_rel", v.tol_eig_rel);
  v.recovery_constant = n.number("recovery_constant", v.recovery_constant);
  v.sweep_points = n.integer("sweep_points", v.sweep_points);
  v.refinement_band = n.boolean("refinement_band", v.refinement_band);
  if (n.has("sup_interval")) {
    auto iv = n.numbers("sup_interval");
    if (iv.size() != 2 || !(iv[0] < iv[1]))
      throw ConfigError(n.child_path("sup_interval") + ": expected [m, M] with m < M");
    v.sup_interval = std::make_pair(iv[0], iv[1]);
  }
  if (n.has("checks")) {
    const json& c = n.raw("checks");
    if (!c.is_array()) throw ConfigError(n.child_path("checks") + ": expected an array of check family names");
    cfg.checks.clear();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string p = n.child_path("checks") + "[" + std::to_string(i) + "]";
      if (!c[i].is_string()) throw ConfigError(p + ": expected a string");
      const auto name = c[i].get<std::string>();
      const auto& fam = verify::check_families();
      if (std::find(fam.begin(), fam.end(), name) == fam.end())
        throw ConfigError(p + ": unknown check family '" + name + "'");
      cfg.checks.insert(name);
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: invalid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  cfg.source_dir = source_dir;
  cfg.checks = std::set<std::string>(verify::check_families().begin(), verify::check_families().end());
  Node root(doc, "$");
  root.allow({"name", "domain", "mesh", "nonlinearity", "initial_data", "states", "solver", "verify",
              "perturbation", "sweep", "output", "seed"});
  cfg.name = root.string("name", cfg.name);
  cfg.seed = root.u64("seed", cfg.seed);

  {
    Node d = root.object("domain");
    d.allow({"gallery", "params", "spline", "mesh_file"});
    if (d.has("gallery") == d.has("spline")) d.fail("exactly one of 'gallery' and 'spline' is required");
    if (d.has("gallery")) {
      cfg.domain.gallery = d.string("gallery");
      cfg.domain.params = d.number_map("params");
    } else {
      if (d.has("params")) d.fail("'params' applies to gallery domains only");
      Node s = d.object("spline");
      s.allow({"outer", "holes"});
      cfg.domain.spline_outer = points(s.raw("outer"), s.child_path("outer"));
      if (s.has("holes")) {
        const json& hs = s.raw("holes");
        if (!hs.is_array()) throw ConfigError(s.child_path("holes") + ": expected an array of point lists");
        for (std::size_t i = 0; i < hs.size(); ++i)
          cfg.domain.spline_holes.push_back(points(hs[i], s.child_path("holes") + "[" + std::to_string(i) + "]"));
      }
    }
    if (d.has("mesh_file")) {
      std::filesystem::path p = d.string("mesh_file");
      if (p.is_relative()) p = std::filesystem::path(source_dir) / p;
      cfg.domain.mesh_file = p.string();
    }
  }

  if (root.has("mesh")) {
    Node m = root.object("mesh");
    m.allow({"h", "curvature_length", "refine_min_angle_deg", "max_circumradius_factor", "smoothing_sweeps",
             "max_vertices"});
    cfg.mesh.h = m.number("h", cfg.mesh.h);
    if (!(cfg.mesh.h > 0.0)) throw ConfigError(m.child_path("h") + ": must be > 0");
    auto& o = cfg.mesh.options;
    o.curvature_length = m.number("curvature_length", o.curvature_length);
    o.refine_min_angle_deg = m.number("refine_min_angle_deg", o.refine_min_angle_deg);
    o.max_circumradius_factor = m.number("max_circumradius_factor", o.max_circumradius_factor);
    o.smoothing_sweeps = m.integer("smoothing_sweeps", o.smoothing_sweeps);
    o.max_vertices = m.integer("max_vertices", o.max_vertices);
  }

  if (root.has("nonlinearity")) {
    Node n = root.object("nonlinearity");
    n.allow({"id", "params"});
    NonlinearityConfig nc;
    nc.id = n.string("id");
    nc.params = n.number_map("params");
    try {
      semilinear::make_nonlinearity(nc.id, nc.params);
    } catch (const Error& e) {
      throw ConfigError(n.path() + ": " + e.what());
    }
    cfg.nonlinearity = nc;
  }

  if (root.has("initial_data"))
    for (const auto& n : root.objects("initial_data")) {
      InitialSpec s;
      s.data = parse_state(n, s.seed_given);
      cfg.initial.push_back(s);
    }
  if (root.has("states"))
    for (const auto& n : root.objects("states")) {
      bool seed_given = false;
      cfg.supplied.push_back(parse_state(n, seed_given));
    }

  if (root.has("solver")) parse_solver(root.object("solver"), cfg.search);
  cfg.verify.eig = cfg.search.eig;
  cfg.verify.newton = cfg.search.newton;
  cfg.verify.saddle_tol = cfg.search.saddle_tol;
  if (root.has("verify")) parse_verify(root.object("verify"), cfg);

  if (root.has("perturbation")) {
    Node p = root.object("perturbation");
    p.allow({"r", "k", "deltas", "h", "robustness_eps"});
    verify::PerturbationConfig pc;
    pc.r = p.number("r", pc.r);
    pc.k = p.integer("k", pc.k);
    if (p.has("deltas")) pc.deltas = p.numbers("deltas");
    pc.h = p.number("h", cfg.mesh.h);
    pc.robustness_eps = p.number("robustness_eps", pc.robustness_eps);
    pc.search = cfg.search;
    cfg.perturbation = pc;
  }

  if (root.has("sweep")) {
    Node s = root.object("sweep");
    s.allow({"axis", "values"});
    SweepConfig sc;
    sc.axis = s.string("axis");
    if (sc.axis != "epsilon" && sc.axis != "d" && sc.axis != "eta" && sc.axis != "a")
      throw ConfigError(s.child_path("axis") + ": expected epsilon, d, eta or a");
    sc.values = s.numbers("values");
    if (sc.values.empty()) throw ConfigError(s.child_path("values") + ": at least one value is required");
    cfg.sweep = sc;
  }

  if (root.has("output")) {
    Node o = root.object("output");
    o.allow({"dir", "fields", "mesh"});
    cfg.output.dir = o.string("dir", cfg.output.dir);
    cfg.output.fields = o.boolean("fields", cfg.output.fields);
    cfg.output.mesh = o.boolean("mesh", cfg.output.mesh);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$: cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(ss.str(), dir.empty() ? "." : dir.string());
}

geometry::DomainSpec build_domain(const DomainConfig& cfg) {
  if (!cfg.gallery.empty()) return geometry::make_gallery_domain(cfg.gallery, cfg.params);
  return geometry::make_spline_domain(cfg.spline_outer, cfg.spline_holes);
}

semilinear::Nonlinearity build_nonlinearity(const NonlinearityConfig& cfg) {
  return semilinear::make_nonlinearity(cfg.id, cfg.params);
}

std::vector<semilinear::InitialData> resolve_initial(const ScenarioConfig& cfg) {
  std::vector<semilinear::InitialData> out;
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    semilinear::InitialData d = cfg.initial[i].data;
    if (d.kind == "random" && !cfg.initial[i].seed_given) d.seed = cfg.seed * 0x9E3779B97F4A7C15ULL + i + 1;
    out.push_back(d);
  }
  return out;
}

}  // namespace pattern_gauge::cli
