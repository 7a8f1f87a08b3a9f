#include "optomech/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "optomech/error.hpp"

namespace optomech {

namespace {

void require(bool ok, const char* field, const char* rule, double value) {
  if (!ok) {
    fail(ErrorCode::domain,
         std::string(field) + " must be " + rule + " (got " + std::to_string(value) + ")");
  }
}

}  // namespace

void validate(const SystemParams& p) {
  require(std::isfinite(p.cavity_length) && p.cavity_length > 0, "cavity_length", "positive",
          p.cavity_length);
  require(std::isfinite(p.mirror_mass) && p.mirror_mass > 0, "mirror_mass", "positive",
          p.mirror_mass);
  require(std::isfinite(p.mechanical_freq) && p.mechanical_freq > 0, "mechanical_freq",
          "positive", p.mechanical_freq);
  require(std::isfinite(p.mechanical_damping) && p.mechanical_damping >= 0, "mechanical_damping",
          "non-negative", p.mechanical_damping);
  require(std::isfinite(p.cavity_decay) && p.cavity_decay > 0, "cavity_decay", "positive",
          p.cavity_decay);
  require(std::isfinite(p.laser_wavelength) && p.laser_wavelength > 0, "laser_wavelength",
          "positive", p.laser_wavelength);
  require(std::isfinite(p.input_power) && p.input_power >= 0, "input_power", "non-negative",
          p.input_power);
  require(std::isfinite(p.detuning), "detuning", "finite", p.detuning);
  require(std::isfinite(p.temperature) && p.temperature >= 0, "temperature", "non-negative",
          p.temperature);
}

double thermal_occupation(double omega, double temperature) {
  require(omega > 0, "mechanical_freq", "positive", omega);
  require(temperature >= 0, "temperature", "non-negative", temperature);
  if (temperature == 0) return 0.0;
  const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

DerivedParams derive(const SystemParams& p) {
  validate(p);
  constexpr double hbar = PhysicalConstants::hbar;
  DerivedParams d;
  d.laser_freq = 2.0 * std::numbers::pi * PhysicalConstants::light_speed / p.laser_wavelength;
  d.cavity_freq = d.laser_freq + p.detuning;
  d.single_photon_coupling =
      d.cavity_freq / p.cavity_length * std::sqrt(hbar / (p.mirror_mass * p.mechanical_freq));
  d.drive_amplitude = std::sqrt(2.0 * p.input_power * p.cavity_decay / (hbar * d.laser_freq));
  d.thermal_occupation = thermal_occupation(p.mechanical_freq, p.temperature);
  return d;
}

}  // namespace optomech
