#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <string>

namespace optomech {

struct SteadyState;
struct SystemParams;

using Matrix4 = Eigen::Matrix4d;

/// Generator of the linearized fluctuation dynamics in the ordering (q, p, X, Y).
struct DriftMatrix {
  Matrix4 m = Matrix4::Zero();
};

DriftMatrix drift_matrix(double omega_m, double gamma_m, double kappa, double delta,
                         double coupling);
DriftMatrix drift_matrix(const SteadyState& ss, const SystemParams& params);

/// exp(A t) by scaling and squaring with a degree-13 Pade approximant.
/// Throws ErrorCode::domain for t < 0.
Matrix4 matrix_exponential(const DriftMatrix& a, double t);
Matrix4 matrix_exponential(const Matrix4& a);

struct StabilityReport {
  bool stable = false;
  double max_real_part = 0;  // largest real part over the spectrum of A
  double margin = 0;         // 1e-9 * ||A||_F; stable means max_real_part < -margin
};

StabilityReport stability(const DriftMatrix& a);

/// Y-Y entry of (gamma_c I - A)^{-1}, i.e. the Laplace transform of exp(A s)_44 at gamma_c.
/// Requires a stable A and gamma_c > 0.
double resolvent_entry_44(const DriftMatrix& a, double gamma_c);

/// Row-major text dump, one row per line, 17 significant digits.
std::string format_matrix(const Matrix4& m);

}  // namespace optomech
