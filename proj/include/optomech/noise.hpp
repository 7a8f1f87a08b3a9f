#pragma once

#include "optomech/dynamics.hpp"
#include "optomech/params.hpp"

namespace optomech {

/// Ornstein-Uhlenbeck laser phase noise: S(omega) = 2 Gamma_L / (1 + omega^2 / gamma_c^2).
/// Both rates are angular. There is no default gamma_c; the white-noise limit is reached
/// with a large but finite correlation rate.
struct NoiseModel {
  double linewidth = 0;         // Gamma_L
  double correlation_rate = 0;  // gamma_c
};

void validate(const NoiseModel& nm);

double phase_noise_spectrum(double omega, const NoiseModel& nm);

enum class NoiseMethod { resolvent, quadrature };

/// Phase-noise contribution N to the Y-Y diffusion entry,
///   N = 2 |alpha|^2 gamma_c Gamma_L  int_0^inf exp(A s)_44 exp(-gamma_c s) ds.
/// The resolvent route evaluates the integral in closed form; quadrature integrates it
/// numerically and exists as an independent check. Rejects an unstable A.
double phase_noise_N(const DriftMatrix& a, double alpha_abs, const NoiseModel& nm,
                     NoiseMethod method = NoiseMethod::resolvent);

/// Laplace integral int_0^inf exp(A s)_44 exp(-gamma_c s) ds by panel-wise adaptive
/// Gauss-Kronrod quadrature, truncated once the tail bound falls below 1e-10 of the estimate.
double laplace_entry_44_quadrature(const DriftMatrix& a, double gamma_c);

/// Closed form of N for a decoupled cavity (G = 0) detuned by `delta`:
///   2 |alpha|^2 Gamma_L gamma_c (gamma_c + kappa) / (delta^2 + (gamma_c + kappa)^2).
double decoupled_noise_N(double alpha_abs, const NoiseModel& nm, double kappa, double delta);

struct DiffusionMatrix {
  Matrix4 m = Matrix4::Zero();  // diag[0, gamma_m (2 nbar + 1), kappa, kappa + N]
  double phase_noise = 0;       // N
};

/// Throws ErrorCode::domain for N < 0 unless `allow_negative` is set (blue-detuned
/// configurations can produce it; callers that flag it rather than reject it opt in).
DiffusionMatrix diffusion_matrix(const SystemParams& params, const DerivedParams& derived,
                                 double phase_noise, bool allow_negative = false);

}  // namespace optomech
