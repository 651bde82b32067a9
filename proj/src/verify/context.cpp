#include "pattern_gauge/verify/context.hpp"

#include <cmath>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/spectral/operators.hpp"

namespace pattern_gauge::verify {

ProblemContext::ProblemContext(geometry::DomainSpec spec, double h, const geometry::MesherOptions& opts)
    : spec_(std::move(spec)) {
  mesh_ = geometry::mesh_domain(spec_, h, opts);
  finish();
}

ProblemContext::ProblemContext(geometry::DomainSpec spec, geometry::Mesh mesh)
    : spec_(std::move(spec)), mesh_(std::move(mesh)) {
  finish();
}

void ProblemContext::finish() {
  curvature_ = geometry::sample_curvature(mesh_, spec_);
  stats_ = geometry::geometry_stats(mesh_, spec_, curvature_);
  ops_ = fem::assemble(mesh_, curvature_, 1.0);
}

const spectral::SpectralResult& ProblemContext::mu(double a, const spectral::SolverOptions& opts) const {
  auto it = mu_cache_.find(a);
  if (it != mu_cache_.end()) return it->second;
  return mu_cache_.emplace(a, spectral::mu_curvature(ops_, a, 2, opts)).first->second;
}

double ProblemContext::neumann_gap(const spectral::SolverOptions& opts) const {
  if (!gap_) gap_ = spectral::neumann_gap(ops_, opts);
  return *gap_;
}

const ProblemContext& ProblemContext::refined() const {
  if (!refined_) {
    geometry::Mesh fine = geometry::refine_uniform(mesh_, spec_, &parents_);
    fine.h_target = 0.5 * mesh_.h_target;
    refined_ = std::make_unique<ProblemContext>(spec_, std::move(fine));
  }
  return *refined_;
}

FieldVector ProblemContext::prolong(const FieldVector& u) const {
  const ProblemContext& fine = refined();
  const int n = mesh_.num_vertices();
  if (u.size() != n) throw MismatchError("prolong: field does not live on this mesh");
  FieldVector out(fine.mesh().num_vertices());
  out.head(n) = u;
  for (std::size_t k = 0; k < parents_.size(); ++k)
    out[n + static_cast<int>(k)] = 0.5 * (u[parents_[k][0]] + u[parents_[k][1]]);
  return out;
}

double StateAnalysis::q() const {
  return norms.grad_sq > 0.0 ? (norms.grad_abs_grad_sq - norms.hessian_sq) / norms.grad_sq : 0.0;
}

namespace {

Eigen::Matrix2d gradient_gram(const geometry::Mesh& mesh, const fem::GradientFields& g) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& d = g.per_triangle[t];
    G += mesh.triangle_area(t) * d * d.transpose();
  }
  return G;
}

}  // namespace

StateAnalysis analyze_state(const ProblemContext& ctx, const StateInput& state, const semilinear::Nonlinearity& f,
                            const VerifyConfig& cfg) {
  StateAnalysis an;
  an.state = &state;
  const auto& ops = ctx.ops();
  an.residual_norm = semilinear::residual_norm(ops, f, state.u);
  an.residual_dual_norm = semilinear::residual_dual_norm(ops, f, state.u);
  an.certified = an.residual_norm <= (state.supplied ? cfg.supplied_certify_tol : cfg.certify_tol);
  an.pattern = semilinear::is_pattern(f, state.u);
  an.osc = state.u.maxCoeff() - state.u.minCoeff();

  an.lambda0 = spectral::lambda_stability(ops, state.u, f, spectral::Variant::neumann, 1.0, 2, cfg.eig);
  an.lambda_gamma = spectral::lambda_stability(ops, state.u, f, spectral::Variant::robin_curvature, 1.0, 2, cfg.eig);
  an.stable = an.lambda0.first() >= -cfg.saddle_tol;
  for (double v : an.lambda0.values)
    if (v < -cfg.saddle_tol) ++an.morse_index;
  if (an.morse_index == static_cast<int>(an.lambda0.values.size()))
    an.notes.push_back("Morse index is at least " + std::to_string(an.morse_index) + " (only " +
                       std::to_string(an.lambda0.values.size()) + " Neumann modes computed)");

  an.norms = fem::norms_and_integrals(ctx.mesh(), ops, state.u, [&](double s) { return f.f(s); });
  auto grads = fem::gradient_fields(ctx.mesh(), state.u);
  an.gx = grads.gx;
  an.gy = grads.gy;
  an.G = gradient_gram(ctx.mesh(), grads);
  an.sup = semilinear::sup_fprime(f, cfg.sup_interval);

  if (cfg.refinement_band && an.pattern) {
    try {
      const ProblemContext& fine = ctx.refined();
      FieldVector uf;
      if (state.supplied && state.descriptor) {
        uf = semilinear::make_initial_data(fine.mesh(), *state.descriptor);
      } else {
        uf = semilinear::newton_refine(fine.ops(), f, ctx.prolong(state.u), cfg.newton).u;
      }
      auto nf = fem::norms_and_integrals(fine.mesh(), fine.ops(), uf, [&](double s) { return f.f(s); });
      an.q_fine = nf.grad_sq > 0.0 ? (nf.grad_abs_grad_sq - nf.hessian_sq) / nf.grad_sq : 0.0;
      an.lambda_gamma_fine =
          spectral::lambda_stability(fine.ops(), uf, f, spectral::Variant::robin_curvature, 1.0, 2, cfg.eig)
              .first();
      an.remark13_lhs_fine = fine.mu(1.0, cfg.eig).first() * nf.grad_sq - nf.f_sq;
      an.remark13_rhs_fine = nf.grad_abs_grad_sq - nf.hessian_sq;
      an.has_band = true;
    } catch (const Error& e) {
      an.notes.push_back(std::string("refinement band unavailable: ") + e.what());
    }
  }
  return an;
}

}  // namespace pattern_gauge::verify
