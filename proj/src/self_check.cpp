#include "optomech/self_check.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optomech/covariance.hpp"
#include "optomech/error.hpp"
#include "optomech/noise.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

RandomSystem random_system(std::mt19937_64& rng, bool red_detuned, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomSystem s{};
  s.omega_m = 1.0;
  s.gamma_m = 0.05 + 0.45 * u(rng);
  s.kappa = 0.1 + 1.9 * u(rng);
  s.delta = 0.05 + 2.95 * u(rng);
  if (!red_detuned && u(rng) < 0.5) s.delta = -s.delta;
  const double critical = std::sqrt(s.omega_m * (s.kappa * s.kappa + s.delta * s.delta) /
                                    std::abs(s.delta));
  s.coupling = 1.3 * critical * u(rng);
  s.gamma_c = 0.05 + 2.95 * u(rng);
  s.nbar = 5.0 * u(rng);
  s.eta = bistability_parameter(s.coupling, s.delta, s.kappa, s.omega_m);

  s.omega_m *= scale;
  s.gamma_m *= scale;
  s.kappa *= scale;
  s.delta *= scale;
  s.coupling *= scale;
  s.gamma_c *= scale;
  s.a = drift_matrix(s.omega_m, s.gamma_m, s.kappa, s.delta, s.coupling);
  s.d = Matrix4::Zero();
  s.d(1, 1) = s.gamma_m * (2 * s.nbar + 1);
  s.d(2, 2) = s.kappa;
  s.d(3, 3) = s.kappa;
  return s;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

template <class Body>
CheckResult run_check(const std::string& name, Body&& body) {
  CheckResult r{name, false, {}};
  try {
    r.detail = body(r.passed);
  } catch (const Error& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  return r;
}

}  // namespace

std::vector<CheckResult> run_self_check(std::uint64_t seed, std::size_t samples) {
  std::vector<CheckResult> results;
  samples = std::max<std::size_t>(samples, 1);

  results.push_back(run_check("lyapunov solve vs ODE integration (1e-6)", [&](bool& ok) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    std::size_t done = 0;
    while (done < samples) {
      const RandomSystem s = random_system(rng, true);
      if (s.eta < 0.05 || !stability(s.a).stable) continue;
      const CovarianceMatrix direct = solve_lyapunov(s.a, s.d);
      const Matrix4 ode = integrate_lyapunov_ode(s.a, s.d, Matrix4::Zero(), 1e6, 0.5, 1e-11);
      worst = std::max(worst, (direct.v - ode).norm() / direct.v.norm());
      ++done;
    }
    ok = worst <= 1e-6;
    return "worst relative difference " + fmt(worst) + " over " + std::to_string(done);
  }));

  results.push_back(run_check("phase noise N: resolvent vs quadrature (1e-8)", [&](bool& ok) {
    std::mt19937_64 rng(seed + 1);
    double worst = 0;
    std::size_t done = 0;
    while (done < samples) {
      const RandomSystem s = random_system(rng, true);
      if (!stability(s.a).stable) continue;
      const NoiseModel nm{0.3, s.gamma_c};
      const double exact = phase_noise_N(s.a, 2.0, nm, NoiseMethod::resolvent);
      const double quad = phase_noise_N(s.a, 2.0, nm, NoiseMethod::quadrature);
      worst = std::max(worst, std::abs(exact - quad) / std::abs(exact));
      ++done;
    }
    ok = worst <= 1e-8;
    return "worst relative difference " + fmt(worst) + " over " + std::to_string(done);
  }));

  results.push_back(run_check("stability <=> 0 < eta < 1 (red detuning)", [&](bool& ok) {
    std::mt19937_64 rng(seed + 2);
    std::size_t mismatches = 0;
    const std::size_t n = 5 * samples;
    for (std::size_t i = 0; i < n; ++i) {
      const RandomSystem s = random_system(rng, true);
      const bool by_eta = s.eta > 0 && s.eta < 1;
      if (stability(s.a).stable != by_eta) ++mismatches;
    }
    ok = mismatches == 0;
    return std::to_string(mismatches) + " mismatches in " + std::to_string(n);
  }));

  results.push_back(run_check("exp semigroup exp(A(t1+t2)) = exp(At1) exp(At2) (1e-9)",
                              [&](bool& ok) {
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    std::size_t done = 0;
    while (done < samples) {
      const RandomSystem s = random_system(rng, true);
      if (!stability(s.a).stable) continue;
      const double t1 = 10.0 / s.kappa * u(rng);
      const double t2 = 10.0 / s.kappa * u(rng);
      const Matrix4 lhs = matrix_exponential(s.a, t1 + t2);
      const Matrix4 rhs = matrix_exponential(s.a, t1) * matrix_exponential(s.a, t2);
      worst = std::max(worst, (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300));
      ++done;
    }
    ok = worst <= 1e-9;
    return "worst relative difference " + fmt(worst);
  }));

  results.push_back(run_check("det A = omega_m^2 (kappa^2 + Delta^2) eta (1e-9)", [&](bool& ok) {
    std::mt19937_64 rng(seed + 4);
    double worst = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      const RandomSystem s = random_system(rng, false);
      const double identity =
          s.omega_m * s.omega_m * (s.kappa * s.kappa + s.delta * s.delta) * s.eta;
      const double scale = s.omega_m * s.omega_m * (s.kappa * s.kappa + s.delta * s.delta);
      worst = std::max(worst, std::abs(s.a.m.determinant() - identity) / scale);
    }
    ok = worst <= 1e-9;
    return "worst relative difference " + fmt(worst);
  }));

  return results;
}

}  // namespace optomech
