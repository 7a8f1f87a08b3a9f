#pragma once

#include "optomech/dynamics.hpp"
#include "optomech/noise.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

/// Symmetric stationary covariance in the ordering (q, p, X, Y), with solve diagnostics.
struct CovarianceMatrix {
  Matrix4 v = Matrix4::Zero();
  double residual = 0;        // ||A V + V A^T + D||_F / ||D||_F (absolute when D = 0)
  double condition = 1;       // reciprocal of the LU condition estimate of the Kronecker system
  bool ill_conditioned = false;  // condition > 1e12
};

inline constexpr double kIllConditioned = 1e12;

/// Unique solution of A V + V A^T = -D through the 16x16 Kronecker system
/// (I (x) A + A (x) I) vec V = -vec D. Rejects an unstable A.
CovarianceMatrix solve_lyapunov(const DriftMatrix& a, const Matrix4& d);
inline CovarianceMatrix solve_lyapunov(const DriftMatrix& a, const DiffusionMatrix& d) {
  return solve_lyapunov(a, d.m);
}

/// Explicit RK4 integration of dV/dt = A V + V A^T + D from `v0` until ||dV/dt||_F falls
/// below `tol` * ||D||_F. The step is `dt_control` / ||A||_F. Test oracle for solve_lyapunov;
/// throws ErrorCode::numerical with the final residual if `t_final` is reached first.
Matrix4 integrate_lyapunov_ode(const DriftMatrix& a, const Matrix4& d, const Matrix4& v0,
                               double t_final, double dt_control = 0.5, double tol = 1e-12);

struct PhononNumber {
  double raw = 0;  // (V11 + V22 - 1) / 2
  double value = 0;  // raw clamped at 0
};

PhononNumber phonon_number(const Matrix4& v);

/// Sideband-cooling limits kappa^2 / (4 omega_m^2) plus a phase-noise term, evaluated
/// unconditionally. Meaningful only for eta near 1, kappa << omega_m and Delta = omega_m.
struct PhononLimits {
  double with_exact_noise = 0;     // + N / (4 kappa), N from the resolvent
  double with_sideband_noise = 0;  // + N / (4 kappa), N from the decoupled closed form at Delta = omega_m
  double spectral = 0;             // + |alpha|^2 S(omega_m) / (2 kappa)
};

PhononLimits phonon_asymptotic(const SystemParams& params, const SteadyState& ss,
                               const NoiseModel& nm, double exact_noise);

}  // namespace optomech
