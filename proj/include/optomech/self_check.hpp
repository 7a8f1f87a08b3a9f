#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "optomech/dynamics.hpp"

namespace optomech {

/// A randomly drawn linearized system, in units where omega_m = `scale`.
struct RandomSystem {
  double omega_m, gamma_m, kappa, delta, coupling, gamma_c, nbar;
  DriftMatrix a;
  Matrix4 d;  // diag[0, gamma_m (2 nbar + 1), kappa, kappa]
  double eta;
};

/// Draws rates spanning weak to beyond-critical coupling so that both signs of eta
/// occur. `red_detuned` restricts Delta > 0; `scale` multiplies every rate.
RandomSystem random_system(std::mt19937_64& rng, bool red_detuned, double scale = 1.0);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle comparisons exposed through the `check` command: Lyapunov solve vs ODE
/// integration, resolvent vs quadrature N, stability vs eta, exp semigroup, det A vs eta.
std::vector<CheckResult> run_self_check(std::uint64_t seed, std::size_t samples);

}  // namespace optomech
