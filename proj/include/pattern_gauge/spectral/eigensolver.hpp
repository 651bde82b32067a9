#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pattern_gauge/fem/assembly.hpp"

namespace pattern_gauge::spectral {

using fem::FieldVector;
using fem::SparseSymMatrix;

enum class Method { automatic, dense, shift_invert };

struct SolverOptions {
  Method method = Method::automatic;
  int dense_limit = 300;         // automatic picks dense at or below this dimension
  double tol = 1e-9;             // target for ||Av - lambda Mv|| / (||Mv|| (1 + |lambda|))
  int max_restarts = 300;
  int basis_blocks = 10;         // Krylov basis holds up to this many blocks
  std::uint64_t seed = 0x5eed;
};

// Generalized problem A v = lambda M v for the k algebraically smallest pairs.
struct OperatorSpec {
  SparseSymMatrix A;
  SparseSymMatrix M;
  int k = 2;
};

struct SpectralResult {
  std::vector<double> values;          // ascending
  std::vector<FieldVector> vectors;    // M-orthonormal
  std::vector<double> residuals;
  std::string method;
  int iterations = 0;                  // operator applications (shift-invert) or 1 (dense)
  double shift = 0.0;
  bool degenerate = false;             // lambda_2 - lambda_1 <= 1e-6 (1 + |lambda_1|)
  double gap = 0.0;                    // lambda_2 - lambda_1 when known

  double first() const { return values.front(); }
};

SpectralResult smallest_eigs(const OperatorSpec& spec, const SolverOptions& opts = {});

// Lower bound on the spectrum of (A, M) from Gershgorin discs of A and of M.
double gershgorin_lower_bound(const SparseSymMatrix& A, const SparseSymMatrix& M);

}  // namespace pattern_gauge::spectral
