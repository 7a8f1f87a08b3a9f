#include "optomech/covariance.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "optomech/error.hpp"

namespace optomech {

namespace {

using Matrix16 = Eigen::Matrix<double, 16, 16>;
using Vector16 = Eigen::Matrix<double, 16, 1>;

Matrix16 kronecker_operator(const Matrix4& a) {
  // Column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
  Matrix16 k = Matrix16::Zero();
  for (int blk = 0; blk < 4; ++blk) k.block<4, 4>(4 * blk, 4 * blk) += a;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) += a(i, j) * Matrix4::Identity();
  }
  return k;
}

Matrix4 lyapunov_rhs(const Matrix4& a, const Matrix4& v, const Matrix4& d) {
  return a * v + v * a.transpose() + d;
}

}  // namespace

CovarianceMatrix solve_lyapunov(const DriftMatrix& a, const Matrix4& d) {
  const StabilityReport st = stability(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "Lyapunov solve requires a stable drift matrix (max real eigenvalue "
       << st.max_real_part << ")";
    fail(ErrorCode::domain, os.str());
  }

  // Rescale time so that ||A|| = 1; V is invariant under A -> A/s, D -> D/s.
  const double scale = a.m.norm();
  const Matrix4 as = a.m / scale;
  const Matrix4 ds = d / scale;
  const Matrix16 op = kronecker_operator(as);
  const Eigen::PartialPivLU<Matrix16> lu(op);

  const Vector16 rhs = -Eigen::Map<const Vector16>(ds.data());
  Vector16 x = lu.solve(rhs);
  x += lu.solve(rhs - op * x);  // one step of iterative refinement

  CovarianceMatrix out;
  const Matrix4 v = Eigen::Map<const Matrix4>(x.data());
  out.v = 0.5 * (v + v.transpose());
  const double d_norm = d.norm();
  const double res = lyapunov_rhs(a.m, out.v, d).norm();
  out.residual = d_norm > 0 ? res / d_norm : res;
  const double rcond = lu.rcond();
  out.condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  out.ill_conditioned = out.condition > kIllConditioned;
  return out;
}

Matrix4 integrate_lyapunov_ode(const DriftMatrix& a, const Matrix4& d, const Matrix4& v0,
                               double t_final, double dt_control, double tol) {
  const double a_norm = a.m.norm();
  const double h = a_norm > 0 ? dt_control / a_norm : t_final;
  const double target = tol * std::max(d.norm(), std::numeric_limits<double>::min());
  auto f = [&](const Matrix4& v) { return lyapunov_rhs(a.m, v, d); };

  Matrix4 v = v0;
  double t = 0;
  double residual = f(v).norm();
  while (residual >= target) {
    if (t >= t_final) {
      std::ostringstream os;
      os << "Lyapunov ODE did not converge by t = " << t_final << " (residual " << residual
         << ")";
      fail(ErrorCode::numerical, os.str());
    }
    const Matrix4 k1 = f(v);
    const Matrix4 k2 = f(v + 0.5 * h * k1);
    const Matrix4 k3 = f(v + 0.5 * h * k2);
    const Matrix4 k4 = f(v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    residual = f(v).norm();
  }
  return 0.5 * (v + v.transpose());
}

PhononNumber phonon_number(const Matrix4& v) {
  PhononNumber n;
  n.raw = 0.5 * (v(0, 0) + v(1, 1) - 1.0);
  n.value = std::max(0.0, n.raw);
  return n;
}

PhononLimits phonon_asymptotic(const SystemParams& params, const SteadyState& ss,
                               const NoiseModel& nm, double exact_noise) {
  const double kappa = params.cavity_decay;
  const double omega_m = params.mechanical_freq;
  const double alpha_abs = std::sqrt(ss.photons);
  const double backaction = kappa * kappa / (4.0 * omega_m * omega_m);

  PhononLimits out;
  out.with_exact_noise = backaction + exact_noise / (4.0 * kappa);
  out.with_sideband_noise =
      backaction + decoupled_noise_N(alpha_abs, nm, kappa, omega_m) / (4.0 * kappa);
  out.spectral = backaction + ss.photons / (2.0 * kappa) * phase_noise_spectrum(omega_m, nm);
  return out;
}

}  // namespace optomech
