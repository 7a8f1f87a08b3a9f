#pragma once

#include <numbers>

#include "optomech/noise.hpp"
#include "optomech/params.hpp"

namespace fixture {

inline constexpr double kTwoPi = 2 * std::numbers::pi;

/// L = 1 mm, m = 5 ng, omega_m/2pi = 10 MHz, gamma_m/2pi = 100 Hz, kappa = 1.4 omega_m,
/// lambda = 810 nm, P = 50 mW.
inline optomech::SystemParams reference_device() {
  optomech::SystemParams p;
  p.cavity_length = 1e-3;
  p.mirror_mass = 5e-12;
  p.mechanical_freq = kTwoPi * 10e6;
  p.mechanical_damping = kTwoPi * 100;
  p.cavity_decay = 1.4 * p.mechanical_freq;
  p.laser_wavelength = 810e-9;
  p.input_power = 0.05;
  p.detuning = 0;
  p.temperature = 0;
  return p;
}

}  // namespace fixture
