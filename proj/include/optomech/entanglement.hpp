#pragma once

#include "optomech/dynamics.hpp"

namespace optomech {

/// Logarithmic negativity of a two-mode Gaussian state and its intermediates. The
/// covariance is partitioned as [[A_m, C], [C^T, B_o]] with the mechanical block on
/// rows/cols (q, p) and the optical block on (X, Y).
struct EntanglementResult {
  double nu_min = 0;  // smallest symplectic eigenvalue of the partial transpose
  double log_negativity = 0;
  double sigma = 0;  // det A_m + det B_o - 2 det C
  double det_mechanical = 0;
  double det_optical = 0;
  double det_correlation = 0;
  double det_total = 0;
};

/// Throws ErrorCode::numerical when Sigma^2 - 4 det V is negative beyond 1e-12 Sigma^2.
EntanglementResult log_negativity(const Matrix4& v);

/// Cofactor expansion; used instead of LU so the branch-point clamp is reproducible.
double det4(const Matrix4& m);

}  // namespace optomech
