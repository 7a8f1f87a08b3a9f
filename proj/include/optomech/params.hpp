#pragma once

namespace optomech {

/// CODATA 2018 exact and recommended values, SI units.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double boltzmann = 1.380649e-23;  // J/K
  static constexpr double light_speed = 299792458.0;  // m/s
};

/// Physical inputs. Every frequency is angular (rad/s); conversion from Hz happens
/// in the configuration loader.
struct SystemParams {
  double cavity_length = 0;       // m
  double mirror_mass = 0;         // kg
  double mechanical_freq = 0;     // omega_m
  double mechanical_damping = 0;  // gamma_m
  double cavity_decay = 0;        // kappa
  double laser_wavelength = 0;    // m
  double input_power = 0;         // W
  double detuning = 0;            // Delta_0 = omega_c - omega_L
  double temperature = 0;         // K
};

struct DerivedParams {
  double laser_freq = 0;              // omega_L = 2 pi c / lambda
  double cavity_freq = 0;             // omega_c = omega_L + Delta_0
  double single_photon_coupling = 0;  // G0
  double drive_amplitude = 0;         // E
  double thermal_occupation = 0;      // nbar
};

/// Throws ErrorCode::domain naming the first field that violates its invariant.
void validate(const SystemParams& params);

/// Bose occupation of a mode at `omega` (rad/s) and temperature `T` (K); exactly 0 at T = 0.
double thermal_occupation(double omega, double temperature);

DerivedParams derive(const SystemParams& params);

}  // namespace optomech
