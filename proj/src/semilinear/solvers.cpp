#include "pattern_gauge/semilinear/solvers.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "pattern_gauge/error.hpp"
#include "pattern_gauge/spectral/operators.hpp"

namespace pattern_gauge::semilinear {

namespace {

FieldVector apply_f(const Nonlinearity& f, const FieldVector& u) {
  FieldVector out(u.size());
  for (int i = 0; i < u.size(); ++i) out[i] = f.f(u[i]);
  return out;
}

double floor_scale(const fem::OperatorBundle& bundle, const Nonlinearity& f) {
  return f.magnitude_scale() * (bundle.M * FieldVector::Ones(bundle.n)).norm();
}

double lumped_residual(const fem::OperatorBundle& bundle, const FieldVector& lumped, const Nonlinearity& f,
                       const FieldVector& u, double floor) {
  FieldVector mf = lumped.cwiseProduct(apply_f(f, u));
  FieldVector ku = bundle.K * u;
  return (ku - mf).norm() / (mf.norm() + ku.norm() + floor);
}

void fill_pattern(SteadyState& s, const Nonlinearity& f) {
  s.osc = s.u.size() ? s.u.maxCoeff() - s.u.minCoeff() : 0.0;
  s.delta_pattern = 1e-4 * f.root_span();
  s.pattern = s.osc > s.delta_pattern;
}

}  // namespace

double residual_norm(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u) {
  if (u.size() != bundle.n) throw MismatchError("state length does not match the operators");
  if (!u.allFinite()) throw NonFiniteFieldError("state contains NaN or Inf");
  FieldVector mf = bundle.M * apply_f(f, u);
  FieldVector ku = bundle.K * u;
  return (ku - mf).norm() / (mf.norm() + ku.norm() + floor_scale(bundle, f));
}

double residual_dual_norm(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u) {
  if (u.size() != bundle.n) throw MismatchError("state length does not match the operators");
  FieldVector mf = bundle.M * apply_f(f, u);
  FieldVector ku = bundle.K * u;
  FieldVector m1 = bundle.M * FieldVector::Ones(bundle.n);
  Eigen::SparseMatrix<double> A = bundle.K + bundle.M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
  if (chol.info() != Eigen::Success) throw FactorizationError("residual_dual_norm: K + M factorization failed");
  auto dual = [&](const FieldVector& x) { return std::sqrt(std::max(0.0, x.dot(chol.solve(x)))); };
  // Same shape as residual_norm, every term measured in the dual norm.
  return dual(ku - mf) / (dual(mf) + dual(ku) + f.magnitude_scale() * dual(m1));
}

double lumped_energy(const fem::OperatorBundle& bundle, const FieldVector& lumped, const Nonlinearity& f,
                     const FieldVector& u) {
  double e = 0.5 * u.dot(bundle.K * u);
  for (int i = 0; i < u.size(); ++i) e -= lumped[i] * f.F(u[i]);
  return e;
}

double energy(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u, bool robin_curvature) {
  if (u.size() != bundle.n) throw MismatchError("state length does not match the operators");
  double e = 0.5 * u.dot(bundle.K * u) - fem::integrate(bundle, u, [&](double s) { return f.F(s); });
  if (robin_curvature) {
    if (bundle.a == 0.0) throw ParameterError("energy: bundle assembled with a = 0 carries no curvature term");
    e += u.dot(bundle.B * u) / bundle.a;
  }
  return e;
}

bool is_pattern(const Nonlinearity& f, const FieldVector& u) {
  return u.size() > 0 && (u.maxCoeff() - u.minCoeff()) > 1e-4 * f.root_span();
}

SteadyState gradient_flow(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                          const FlowConfig& cfg) {
  if (!(cfg.tau0 > 0.0) || !(cfg.tol > 0.0) || !(cfg.grow > 1.0) || !(cfg.shrink > 0.0 && cfg.shrink < 1.0))
    throw ParameterError("flow: tau0 > 0, tol > 0, grow > 1 and 0 < shrink < 1 are required");
  if (u0.size() != bundle.n) throw MismatchError("initial data length does not match the mesh");
  if (!u0.allFinite()) throw NonFiniteFieldError("initial data contains NaN or Inf");

  const FieldVector lumped = bundle.lumped_mass();
  const double floor = floor_scale(bundle, f);
  SteadyState s;
  s.method = "gradient_flow";
  s.u = u0;
  double E = lumped_energy(bundle, lumped, f, s.u);
  double r = lumped_residual(bundle, lumped, f, s.u, floor);
  s.trace.energy.push_back(E);
  s.trace.residual.push_back(r);

  const auto& roots = f.roots();
  const bool confine = cfg.confine && roots.size() >= 2 && u0.minCoeff() >= roots.front() &&
                       u0.maxCoeff() <= roots.back();
  s.trace.confined = confine;
  const double lo = confine ? roots.front() - 1e-8 : 0.0, hi = confine ? roots.back() + 1e-8 : 0.0;

  std::map<double, std::unique_ptr<Eigen::SimplicialLLT<fem::SparseSymMatrix>>> cache;
  auto solver = [&](double tau) -> Eigen::SimplicialLLT<fem::SparseSymMatrix>& {
    auto it = cache.find(tau);
    if (it != cache.end()) return *it->second;
    if (cache.size() >= 12) cache.erase(cache.begin());
    fem::SparseSymMatrix A = tau * bundle.K;
    for (int i = 0; i < bundle.n; ++i) A.coeffRef(i, i) += lumped[i];
    auto llt = std::make_unique<Eigen::SimplicialLLT<fem::SparseSymMatrix>>(A);
    if (llt->info() != Eigen::Success) throw FactorizationError("flow: factorization of M_L + tau K failed");
    return *cache.emplace(tau, std::move(llt)).first->second;
  };

  double tau = cfg.tau0;
  int streak = 0;
  s.converged = r <= cfg.tol;
  while (!s.converged && s.trace.steps < cfg.max_steps) {
    ++s.trace.steps;
    FieldVector rhs = lumped.cwiseProduct(s.u + tau * apply_f(f, s.u));
    FieldVector un = solver(tau).solve(rhs);
    bool ok = un.allFinite();
    double En = ok ? lumped_energy(bundle, lumped, f, un) : 0.0;
    if (ok) ok = En <= E + 1e-12 * (1.0 + std::abs(E));
    if (ok && confine) ok = un.minCoeff() >= lo && un.maxCoeff() <= hi;
    if (!ok) {
      ++s.trace.rejected;
      tau *= cfg.shrink;
      streak = 0;
      if (tau < cfg.tau_min) {
        if (!un.allFinite()) throw NonFiniteFieldError("flow produced non-finite values even at the minimum step");
        break;
      }
      continue;
    }
    ++s.trace.accepted;
    s.u = un;
    E = En;
    r = lumped_residual(bundle, lumped, f, s.u, floor);
    s.trace.tau.push_back(tau);
    s.trace.energy.push_back(E);
    s.trace.residual.push_back(r);
    s.converged = r <= cfg.tol;
    if (++streak >= cfg.grow_after) {
      tau = std::min(cfg.tau_max, tau * cfg.grow);
      streak = 0;
    }
  }
  s.residual_norm = residual_norm(bundle, f, s.u);
  fill_pattern(s, f);
  return s;
}

SteadyState newton_refine(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                          const NewtonConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_steps < 1 || !(cfg.damping_min > 0.0 && cfg.damping_min <= 1.0))
    throw ParameterError("newton: tol > 0, max_steps >= 1 and 0 < damping_min <= 1 are required");
  SteadyState s;
  s.method = "newton";
  s.u = u0;
  double rn = residual_norm(bundle, f, s.u);
  s.trace.residual.push_back(rn);
  s.trace.energy.push_back(energy(bundle, f, s.u));
  int slow = 0;
  while (rn > cfg.tol) {
    if (s.trace.steps >= cfg.max_steps) {
      std::ostringstream os;
      os << "Newton did not reach " << cfg.tol << " in " << cfg.max_steps << " steps (residual " << rn << ")";
      throw NonConvergenceError(os.str());
    }
    ++s.trace.steps;
    FieldVector fp(bundle.n);
    for (int i = 0; i < bundle.n; ++i) fp[i] = f.fprime(s.u[i]);
    fem::SparseSymMatrix J = bundle.K - bundle.M * fp.asDiagonal();
    J.makeCompressed();
    Eigen::SparseLU<fem::SparseSymMatrix> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw SingularJacobianError("Newton Jacobian K - M f'(u) is singular");
    FieldVector R = bundle.K * s.u - bundle.M * apply_f(f, s.u);
    FieldVector d = lu.solve(-R);
    if (!d.allFinite()) throw SingularJacobianError("Newton step is not finite (degenerate steady state)");
    double alpha = 1.0;
    FieldVector ut;
    double rt = 0.0;
    for (;;) {
      ut = s.u + alpha * d;
      rt = ut.allFinite() ? residual_norm(bundle, f, ut) : std::numeric_limits<double>::infinity();
      if (rt <= (1.0 - 1e-4 * alpha) * rn) break;
      alpha *= 0.5;
      if (alpha < cfg.damping_min) {
        std::ostringstream os;
        os << "damped Newton stalled at residual " << rn << " after " << s.trace.steps << " steps";
        throw NonConvergenceError(os.str());
      }
    }
    if (alpha < 1.0 || rt > 0.1 * rn) ++slow;
    s.u = ut;
    rn = rt;
    s.trace.damping.push_back(alpha);
    s.trace.residual.push_back(rn);
    s.trace.energy.push_back(energy(bundle, f, s.u));
    ++s.trace.accepted;
  }
  s.trace.crawl = slow > 8;
  const auto& h = s.trace.residual;
  const std::size_t m = h.size();
  if (m <= 2 || h[m - 1] < 1e-13) {
    s.trace.quadratic_tail = true;
  } else {
    double p = std::log(h[m - 1] / h[m - 2]) / std::log(h[m - 2] / h[m - 3]);
    s.trace.quadratic_tail = p >= 1.5 || h[m - 1] <= h[m - 2] * h[m - 2] * 1e3;
  }
  s.residual_norm = rn;
  s.converged = true;
  fill_pattern(s, f);
  return s;
}

SearchResult find_stable_state(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                               const SearchConfig& cfg) {
  SearchResult out;
  FieldVector start = u0;
  for (;;) {
    SteadyState flow = gradient_flow(bundle, f, start, cfg.flow);
    SteadyState best = flow;
    try {
      SteadyState nt = newton_refine(bundle, f, flow.u, cfg.newton);
      nt.trace.steps += flow.trace.steps;
      nt.trace.tau = flow.trace.tau;
      nt.trace.energy.insert(nt.trace.energy.begin(), flow.trace.energy.begin(), flow.trace.energy.end());
      nt.method = "gradient_flow+newton";
      best = nt;
      out.newton_ok = true;
    } catch (const Error& e) {
      out.newton_ok = false;
      out.notes.push_back(std::string("newton fallback to flow output: ") + e.what());
    }
    auto lam = spectral::lambda_stability(bundle, best.u, f, spectral::Variant::neumann, 1.0, 2, cfg.eig);
    out.state = best;
    out.lambda0 = lam.values[0];
    if (out.lambda0 >= -cfg.saddle_tol || out.escapes >= cfg.max_escapes) {
      if (out.lambda0 < -cfg.saddle_tol) out.notes.push_back("unstable state kept after the escape budget ran out");
      return out;
    }
    const FieldVector& phi = lam.vectors[0];
    start = best.u + cfg.escape_amplitude * f.root_span() * phi / phi.cwiseAbs().maxCoeff();
    if (!f.roots().empty() && f.roots().size() >= 2)
      start = start.cwiseMax(f.roots().front()).cwiseMin(f.roots().back());
    ++out.escapes;
    out.notes.push_back("escaped a saddle with lambda_0 = " + std::to_string(out.lambda0));
  }
}

}  // namespace pattern_gauge::semilinear
