#include "optomech/noise.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "optomech/error.hpp"

namespace optomech {

void validate(const NoiseModel& nm) {
  if (!(std::isfinite(nm.linewidth) && nm.linewidth >= 0)) {
    fail(ErrorCode::domain, "linewidth must be non-negative");
  }
  if (!(std::isfinite(nm.correlation_rate) && nm.correlation_rate > 0)) {
    fail(ErrorCode::domain, "correlation_rate must be positive and finite");
  }
}

double phase_noise_spectrum(double omega, const NoiseModel& nm) {
  const double r = omega / nm.correlation_rate;
  return 2.0 * nm.linewidth / (1.0 + r * r);
}

namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelIntegrator {
  const DriftMatrix& a;
  double gamma_c;

  // Integral of (M0 exp(A (t - t0)))_44 exp(-gamma_c t) over [t0 + lo, t0 + hi].
  std::pair<double, double> rule(const Matrix4& m0, double t0, double lo, double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    auto f = [&](double u) {
      const Matrix4 e = matrix_exponential(a, u);
      return m0.row(3).dot(e.col(3)) * std::exp(-gamma_c * (t0 + u));
    };
    const double fc = f(mid);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      const double sum = f(mid - dx) + f(mid + dx);
      kronrod += kWgk[j] * sum;
      if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
  }

  double adaptive(const Matrix4& m0, double t0, double lo, double hi, double tol,
                  int depth) const {
    const auto [value, err] = rule(m0, t0, lo, hi);
    if (err <= tol || depth >= 30) return value;
    const double mid = 0.5 * (lo + hi);
    return adaptive(m0, t0, lo, mid, 0.5 * tol, depth + 1) +
           adaptive(m0, t0, mid, hi, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double laplace_entry_44_quadrature(const DriftMatrix& a, double gamma_c) {
  if (!(gamma_c > 0)) fail(ErrorCode::domain, "quadrature requires gamma_c > 0");
  Eigen::EigenSolver<Matrix4> solver(a.m, false);
  const double spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  // Panels resolve the fastest oscillation or decay with a fraction of a period each.
  const double width = 1.0 / std::max(spectral_radius, gamma_c);
  const Matrix4 step = matrix_exponential(a, width);

  constexpr long kMaxPanels = 20'000'000;
  PanelIntegrator integ{a, gamma_c};
  Matrix4 m = Matrix4::Identity();
  double total = 0;
  double bound = 1.0;  // running max of ||exp(A t)||_F
  for (long k = 0; k < kMaxPanels; ++k) {
    const double t0 = static_cast<double>(k) * width;
    const double decay = std::exp(-gamma_c * t0);
    const double panel_tol = 1e-15 * std::max(std::abs(total), width * decay * bound);
    total += integ.adaptive(m, t0, 0.0, width, panel_tol, 0);
    m = m * step;
    bound = std::max(bound, m.norm());
    const double t1 = t0 + width;
    const double tail = bound * std::exp(-gamma_c * t1) / gamma_c;
    if (tail < 1e-10 * std::max(std::abs(total), 1e-6 * width)) return total;
  }
  fail(ErrorCode::numerical, "quadrature panel budget exhausted before the tail bound converged");
}

double phase_noise_N(const DriftMatrix& a, double alpha_abs, const NoiseModel& nm,
                     NoiseMethod method) {
  validate(nm);
  const StabilityReport st = stability(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "phase_noise_N requires a stable drift matrix (max real eigenvalue "
       << st.max_real_part << ")";
    fail(ErrorCode::domain, os.str());
  }
  const double prefactor = 2.0 * alpha_abs * alpha_abs * nm.correlation_rate * nm.linewidth;
  if (prefactor == 0) return 0.0;
  const double integral = method == NoiseMethod::resolvent
                              ? resolvent_entry_44(a, nm.correlation_rate)
                              : laplace_entry_44_quadrature(a, nm.correlation_rate);
  return prefactor * integral;
}

double decoupled_noise_N(double alpha_abs, const NoiseModel& nm, double kappa, double delta) {
  const double s = nm.correlation_rate + kappa;
  return 2.0 * alpha_abs * alpha_abs * nm.linewidth * nm.correlation_rate * s /
         (delta * delta + s * s);
}

DiffusionMatrix diffusion_matrix(const SystemParams& params, const DerivedParams& derived,
                                 double phase_noise, bool allow_negative) {
  if (!allow_negative && phase_noise < 0) {
    fail(ErrorCode::domain, "phase-noise diffusion N must be non-negative");
  }
  DiffusionMatrix d;
  d.phase_noise = phase_noise;
  d.m(1, 1) = params.mechanical_damping * (2.0 * derived.thermal_occupation + 1.0);
  d.m(2, 2) = params.cavity_decay;
  d.m(3, 3) = params.cavity_decay + phase_noise;
  return d;
}

}  // namespace optomech
