#include "pattern_gauge/spectral/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::spectral {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Ldlt = Eigen::SimplicialLDLT<SparseSymMatrix>;

// Factors A - sigma M; reports the number of negative pivots (eigenvalues below sigma).
bool factor_shifted(const SparseSymMatrix& A, const SparseSymMatrix& M, double sigma, Ldlt& ldlt, int& negative) {
  SparseSymMatrix S = A - sigma * M;
  ldlt.compute(S);
  if (ldlt.info() != Eigen::Success) return false;
  const VectorXd D = ldlt.vectorD();
  const double dmax = D.cwiseAbs().maxCoeff();
  negative = 0;
  for (int i = 0; i < D.size(); ++i) {
    if (!std::isfinite(D[i]) || std::abs(D[i]) <= 1e-14 * dmax) return false;
    if (D[i] < 0) ++negative;
  }
  return true;
}

struct KrylovRun {
  std::vector<double> theta;
  MatrixXd X;
  std::vector<double> residuals;
  int applications = 0;
  int restarts = 0;
  bool converged = false;
  std::vector<double> history;  // worst residual after each restart
};

// M-orthonormalizes the columns of W against the basis V (with MV = M V) and among themselves.
// Columns that collapse below the drop tolerance are discarded.
MatrixXd orthonormalize(const SparseSymMatrix& M, const MatrixXd& V, const MatrixXd& MV, MatrixXd W) {
  for (int pass = 0; pass < 2; ++pass)
    if (V.cols() > 0) W -= V * (MV.transpose() * W);
  std::vector<VectorXd> kept, kept_m;
  for (int j = 0; j < W.cols(); ++j) {
    VectorXd w = W.col(j);
    VectorXd mw = M * w;
    const double orig = std::sqrt(std::max(0.0, w.dot(mw)));
    if (!(orig > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (V.cols() > 0) w -= V * (MV.transpose() * w);
      for (std::size_t i = 0; i < kept.size(); ++i) w -= kept[i] * kept_m[i].dot(w);
    }
    mw = M * w;
    const double nrm = std::sqrt(std::max(0.0, w.dot(mw)));
    if (!(nrm > 1e-10 * orig)) continue;
    kept.push_back(w / nrm);
    kept_m.push_back(mw / nrm);
  }
  MatrixXd Q(W.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) Q.col(i) = kept[i];
  return Q;
}

MatrixXd random_block(int n, int b, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXd R(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) R(i, j) = nd(rng);
  return R;
}

// Thick-restart block Krylov on (A - sigma M)^{-1} M with Rayleigh-Ritz on (A, M).
// `tol_rel(theta)` is the acceptance threshold for each of the first `want` residuals.
template <class Tol>
KrylovRun block_krylov(const SparseSymMatrix& A, const SparseSymMatrix& M, const Ldlt& ldlt, int want,
                       const MatrixXd& start, int basis_blocks, int max_restarts, std::mt19937_64& rng, Tol tol_rel) {
  const int n = static_cast<int>(A.rows());
  const int b = static_cast<int>(start.cols());
  const int mmax = std::min(n, std::max(basis_blocks * b, want + 2 * b));
  KrylovRun run;
  MatrixXd V(n, 0), AV(n, 0), MV(n, 0);
  auto append = [&](const MatrixXd& Q) {
    const Eigen::Index c = V.cols();
    V.conservativeResize(n, c + Q.cols());
    AV.conservativeResize(n, c + Q.cols());
    MV.conservativeResize(n, c + Q.cols());
    V.rightCols(Q.cols()) = Q;
    AV.rightCols(Q.cols()) = A * Q;
    MV.rightCols(Q.cols()) = M * Q;
  };
  MatrixXd cur = orthonormalize(M, V, MV, start);
  if (cur.cols() == 0) cur = orthonormalize(M, V, MV, random_block(n, b, rng));
  append(cur);

  for (int restart = 0; restart <= max_restarts; ++restart) {
    while (V.cols() < mmax) {
      MatrixXd W(n, cur.cols());
      for (int j = 0; j < cur.cols(); ++j) W.col(j) = ldlt.solve(M * cur.col(j));
      run.applications += static_cast<int>(cur.cols());
      W.conservativeResize(n, std::min<Eigen::Index>(W.cols(), mmax - V.cols()));
      MatrixXd Q = orthonormalize(M, V, MV, W);
      if (Q.cols() == 0) {
        // Invariant subspace reached; continue from fresh random directions.
        Q = orthonormalize(M, V, MV, random_block(n, std::min<int>(b, mmax - V.cols()), rng));
        if (Q.cols() == 0) break;
      }
      append(Q);
      cur = Q;
    }
    MatrixXd H = V.transpose() * AV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    const VectorXd& th = es.eigenvalues();
    const MatrixXd& Y = es.eigenvectors();
    const int m = static_cast<int>(V.cols());
    const int w = std::min(want, m);
    MatrixXd X = V * Y.leftCols(w);
    MatrixXd AX = AV * Y.leftCols(w);
    MatrixXd MX = MV * Y.leftCols(w);
    run.theta.assign(th.data(), th.data() + w);
    run.residuals.assign(w, 0.0);
    bool ok = true;
    double worst = 0.0;
    for (int j = 0; j < w; ++j) {
      run.residuals[j] = (AX.col(j) - th[j] * MX.col(j)).norm() / MX.col(j).norm();
      worst = std::max(worst, run.residuals[j] / tol_rel(th[j]));
      if (!(run.residuals[j] <= tol_rel(th[j]))) ok = false;
    }
    run.history.push_back(worst);
    run.X = X;
    run.restarts = restart;
    if (ok || m >= n) {
      run.converged = ok || m >= n;
      return run;
    }
    const int keep = std::min(m - b, std::max(want + b, m / 2));
    V = (V * Y.leftCols(keep)).eval();
    AV = (AV * Y.leftCols(keep)).eval();
    MV = (MV * Y.leftCols(keep)).eval();
    cur = V.leftCols(std::min(b, keep));
  }
  return run;
}

void normalize_signs(SpectralResult& r, const SparseSymMatrix& M) {
  for (std::size_t j = 0; j < r.vectors.size(); ++j) {
    FieldVector& v = r.vectors[j];
    double ref;
    if (j == 0) {
      ref = (M * FieldVector::Ones(v.size())).dot(v);
    } else {
      Eigen::Index idx;
      v.cwiseAbs().maxCoeff(&idx);
      ref = v[idx];
    }
    if (ref < 0) v = -v;
  }
}

void finish(SpectralResult& r, const OperatorSpec& spec, int k) {
  if (r.values.size() >= 2) {
    r.gap = r.values[1] - r.values[0];
    r.degenerate = r.gap <= 1e-6 * (1.0 + std::abs(r.values[0]));
  }
  r.residuals.clear();
  for (std::size_t j = 0; j < r.vectors.size(); ++j) {
    FieldVector mv = spec.M * r.vectors[j];
    r.residuals.push_back((spec.A * r.vectors[j] - r.values[j] * mv).norm() / mv.norm());
  }
  normalize_signs(r, spec.M);
  r.values.resize(k);
  r.vectors.resize(k);
  r.residuals.resize(k);
}

}  // namespace

double gershgorin_lower_bound(const SparseSymMatrix& A, const SparseSymMatrix& M) {
  const int n = static_cast<int>(A.rows());
  VectorXd diagA = VectorXd::Zero(n), offA = VectorXd::Zero(n);
  VectorXd diagM = VectorXd::Zero(n), rowM = VectorXd::Zero(n);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseSymMatrix::InnerIterator it(A, c); it; ++it) {
      if (it.row() == it.col()) diagA[it.row()] += it.value();
      else offA[it.row()] += std::abs(it.value());
    }
  for (int c = 0; c < M.outerSize(); ++c)
    for (SparseSymMatrix::InnerIterator it(M, c); it; ++it) {
      if (it.row() == it.col()) diagM[it.row()] += it.value();
      rowM[it.row()] += std::abs(it.value());
    }
  const double gA = (diagA - offA).minCoeff();
  // For P1 mass matrices the element eigenvalues are |T|/12 {1,1,4}, so M >= diag(M)/2.
  const double mmin = 0.5 * diagM.minCoeff();
  const double mmax = rowM.maxCoeff();
  if (!(mmin > 0.0)) throw ParameterError("mass matrix has a non-positive diagonal entry");
  return gA >= 0.0 ? gA / mmax : gA / mmin;
}

SpectralResult smallest_eigs(const OperatorSpec& spec, const SolverOptions& opts) {
  const int n = static_cast<int>(spec.A.rows());
  if (spec.A.cols() != n || spec.M.rows() != n || spec.M.cols() != n)
    throw MismatchError("eigenproblem matrices have inconsistent sizes");
  if (spec.k < 1 || spec.k > n) throw ParameterError("eigenvalue count k must satisfy 1 <= k <= n");
  const int k_eff = std::min(n, std::max(spec.k, 2));

  const bool dense = opts.method == Method::dense || (opts.method == Method::automatic && n <= opts.dense_limit);
  SpectralResult r;
  if (dense) {
    MatrixXd Ad = MatrixXd(spec.A), Md = MatrixXd(spec.M);
    Ad = 0.5 * (Ad + Ad.transpose()).eval();
    Md = 0.5 * (Md + Md.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(Ad, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw FactorizationError("dense generalized eigensolver failed (mass not SPD?)");
    for (int j = 0; j < k_eff; ++j) {
      r.values.push_back(es.eigenvalues()[j]);
      r.vectors.push_back(es.eigenvectors().col(j));
    }
    r.method = "dense";
    r.iterations = 1;
    finish(r, spec, spec.k);
    return r;
  }

  std::mt19937_64 rng(opts.seed);
  const int b = k_eff + 1;
  Ldlt ldlt;
  int negative = 0;
  // The Gershgorin bound is a guaranteed floor but typically far below lambda_1 on graded meshes.
  // Walk down from an upper bound (the Rayleigh quotient of the constant vector) in growing steps
  // until the factorization certifies by inertia that no eigenvalue lies below the shift.
  const double g = gershgorin_lower_bound(spec.A, spec.M);
  const FieldVector one = FieldVector::Ones(n);
  const double upper = one.dot(spec.A * one) / one.dot(spec.M * one);
  const double step = 1e-2 * (1.0 + std::abs(upper));
  double sigma = g - 1e-2 * (1.0 + std::abs(g));
  bool ok = false;
  for (int j = 0; !ok; ++j) {
    double s = upper - step * std::pow(4.0, j);
    if (s <= sigma) break;
    ok = factor_shifted(spec.A, spec.M, s, ldlt, negative) && negative == 0;
    if (ok) sigma = s;
  }
  for (int attempt = 0; attempt <= 3 && !ok; ++attempt) {
    if (attempt > 0) sigma -= 0.1 * (1.0 + std::abs(sigma)) * attempt;
    ok = factor_shifted(spec.A, spec.M, sigma, ldlt, negative) && negative == 0;
  }
  if (!ok) throw FactorizationError("shifted factorization failed below the Gershgorin bound after 3 retries");

  // Coarse pass at the safe shift, then move the shift up to just below the first Ritz value.
  auto loose = [](double th) { return 1e-3 * (1.0 + std::abs(th)); };
  KrylovRun coarse = block_krylov(spec.A, spec.M, ldlt, k_eff, random_block(n, b, rng), opts.basis_blocks,
                                  opts.max_restarts, rng, loose);
  int applications = coarse.applications;
  double used_shift = sigma;
  if (coarse.converged) {
    const double th1 = coarse.theta.front();
    const double delta = 1e-2 * (1.0 + std::abs(th1));
    for (int attempt = 0; attempt < 3; ++attempt) {
      const double s1 = th1 - delta * std::pow(10.0, attempt);
      if (s1 <= sigma) break;
      Ldlt trial;
      int neg = 0;
      if (factor_shifted(spec.A, spec.M, s1, trial, neg) && neg == 0) {
        ldlt.compute(spec.A - s1 * spec.M);
        used_shift = s1;
        break;
      }
    }
  }
  const double tol = opts.tol;
  // Relative to |theta|: strongly negative Robin eigenvalues stagnate at roundoff well above tol.
  auto fine = [tol](double th) { return tol * (1.0 + std::abs(th)); };
  MatrixXd start = coarse.X;
  if (start.cols() < b) {
    MatrixXd s2(n, b);
    s2.leftCols(start.cols()) = start;
    s2.rightCols(b - start.cols()) = random_block(n, b - static_cast<int>(start.cols()), rng);
    start = s2;
  }
  KrylovRun run = block_krylov(spec.A, spec.M, ldlt, k_eff, start, opts.basis_blocks, opts.max_restarts, rng, fine);
  applications += run.applications;
  if (!run.converged) {
    std::ostringstream os;
    os << "shift-invert eigensolver did not converge after " << run.restarts << " restarts (shift " << used_shift
       << "); scaled worst residual trace:";
    const std::size_t from = run.history.size() > 8 ? run.history.size() - 8 : 0;
    for (std::size_t i = from; i < run.history.size(); ++i) os << ' ' << run.history[i];
    throw NonConvergenceError(os.str());
  }
  for (int j = 0; j < k_eff; ++j) {
    r.values.push_back(run.theta[j]);
    r.vectors.push_back(run.X.col(j));
  }
  r.method = "shift_invert";
  r.iterations = applications;
  r.shift = used_shift;
  finish(r, spec, spec.k);
  return r;
}

}  // namespace pattern_gauge::spectral
