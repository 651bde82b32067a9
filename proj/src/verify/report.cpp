#include "pattern_gauge/verify/report.hpp"

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::verify {

const std::vector<std::string>& check_families() {
  static const std::vector<std::string> families{"residual",       "theorem1",   "breakdown",
                                                 "cacciopoli",     "flatness",   "lemma_identities",
                                                 "convex_state",   "convex_bounds"};
  return families;
}

bool VerificationReport::hard_checks_pass() const {
  for (const auto& o : checks.outcomes)
    if (o.severity == Severity::hard && !o.pass) return false;
  return true;
}

VerificationReport verify_states(const ProblemContext& ctx, const std::vector<StateInput>& states,
                                 const semilinear::Nonlinearity& f, const VerifyConfig& cfg,
                                 const std::set<std::string>& enabled, std::vector<StateAnalysis>* analyses) {
  for (const auto& e : enabled) {
    bool known = false;
    for (const auto& k : check_families()) known = known || k == e;
    if (!known) throw ParameterError("unknown check family '" + e + "'");
  }
  auto on = [&](const char* name) { return enabled.count(name) > 0; };

  VerificationReport rep;
  rep.domain = ctx.spec().gallery_id.empty() ? "custom" : ctx.spec().gallery_id;
  rep.domain_params = ctx.spec().params;
  rep.h = ctx.h();
  rep.vertices = ctx.mesh().num_vertices();
  rep.triangles = ctx.mesh().num_triangles();
  rep.min_angle_deg = ctx.mesh().min_angle_degrees();
  rep.max_edge = ctx.mesh().max_edge_length();
  rep.stats = ctx.stats();
  rep.nonlinearity = f.id();
  rep.nonlinearity_params = f.params();
  auto sup = semilinear::sup_fprime(f, cfg.sup_interval);
  rep.sup_fprime = sup.value;
  rep.sup_restricted = sup.restricted;
  for (double a : cfg.a_grid) rep.mu[a] = ctx.mu(a, cfg.eig).values;
  rep.lambda2_neumann = ctx.neumann_gap(cfg.eig);

  if (on("convex_bounds")) rep.checks.append(check_convex_bounds(ctx, &f, cfg));

  for (const auto& s : states) {
    StateAnalysis an = analyze_state(ctx, s, f, cfg);
    StateSummary sum;
    sum.label = s.label;
    sum.supplied = s.supplied;
    sum.residual_norm = an.residual_norm;
    sum.residual_dual_norm = an.residual_dual_norm;
    sum.certified = an.certified;
    sum.osc = an.osc;
    sum.pattern = an.pattern;
    sum.stable = an.stable;
    sum.morse_index = an.morse_index;
    sum.lambda0 = an.lambda0.values;
    sum.lambda_gamma = an.lambda_gamma.values;
    sum.method = s.method;
    sum.steps = s.steps;
    sum.escapes = s.escapes;
    sum.newton_ok = s.newton_ok;
    sum.notes = s.notes;
    sum.notes.insert(sum.notes.end(), an.notes.begin(), an.notes.end());
    rep.states.push_back(sum);
    if (an.pattern && an.stable) rep.stable_pattern_found = true;
    if (analyses) analyses->push_back(an);

    if (on("residual")) rep.checks.append(check_residual(ctx, an, f, cfg));
    if (!an.certified) {
      for (const auto& fam : check_families())
        if (fam != "residual" && fam != "convex_bounds" && on(fam.c_str()))
          rep.checks.skipped.push_back({fam, s.label, "residual certificate not met"});
      continue;
    }
    if (an.pattern) {
      if (on("theorem1")) rep.checks.append(check_theorem1(ctx, an, f, cfg));
      if (on("flatness")) rep.checks.append(check_flatness(ctx, an, f, cfg));
    } else {
      for (const char* fam : {"theorem1", "flatness"})
        if (on(fam)) rep.checks.skipped.push_back({fam, s.label, "constant state"});
    }
    if (on("breakdown")) rep.checks.append(check_breakdown(ctx, an, f, cfg));
    if (on("cacciopoli")) rep.checks.append(check_cacciopoli(ctx, an, f, cfg));
    if (on("lemma_identities")) rep.checks.append(check_lemma_identities(ctx, an, f, cfg));
    if (on("convex_state")) rep.checks.append(check_convex_state(ctx, an, f, cfg));
  }

  int patterns = 0, stable = 0;
  for (const auto& s : rep.states) {
    patterns += s.pattern;
    stable += s.pattern && s.stable;
  }
  if (rep.states.empty())
    rep.summary = "no states analysed";
  else if (stable > 0)
    rep.summary = std::to_string(stable) + " stable pattern(s) found among " + std::to_string(rep.states.size()) +
                  " state(s)";
  else if (patterns > 0)
    rep.summary = "no stable pattern found; " + std::to_string(patterns) + " unstable pattern(s)";
  else
    rep.summary = "no stable pattern found";
  return rep;
}

}  // namespace pattern_gauge::verify
