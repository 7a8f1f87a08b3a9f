#include <doctest.h>

#include <cmath>
#include <numbers>

#include "optomech/error.hpp"
#include "optomech/params.hpp"

using namespace optomech;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

SystemParams reference_device() {
  SystemParams p;
  p.cavity_length = 1e-3;
  p.mirror_mass = 5e-12;
  p.mechanical_freq = kTwoPi * 10e6;
  p.mechanical_damping = kTwoPi * 100;
  p.cavity_decay = 1.4 * p.mechanical_freq;
  p.laser_wavelength = 810e-9;
  p.input_power = 0.05;
  return p;
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("zero drive and zero temperature") {
    SystemParams p = reference_device();
    p.input_power = 0;
    p.temperature = 0;
    const DerivedParams d = derive(p);
    CHECK(d.drive_amplitude == 0.0);
    CHECK(d.thermal_occupation == 0.0);
  }

  TEST_CASE("reference device regression") {
    // Evaluated once at 30 digits from the closed forms with CODATA 2018 constants.
    const DerivedParams d = derive(reference_device());
    CHECK(d.single_photon_coupling == doctest::Approx(1347.34463215323104641873170698).epsilon(1e-13));
    CHECK(d.drive_amplitude == doctest::Approx(5989052159192.98751940723250214).epsilon(1e-13));
    CHECK(d.cavity_freq == d.laser_freq);
  }

  TEST_CASE("cavity frequency follows the detuning") {
    SystemParams p = reference_device();
    p.detuning = kTwoPi * 3e6;
    const DerivedParams d = derive(p);
    CHECK(d.cavity_freq - d.laser_freq == doctest::Approx(p.detuning).epsilon(1e-6));
  }

  TEST_CASE("thermal occupation") {
    CHECK(thermal_occupation(1.0, 0.0) == 0.0);
    const double omega = kTwoPi * 10e6;
    const double t_ln2 = PhysicalConstants::hbar * omega / (PhysicalConstants::boltzmann * std::log(2.0));
    CHECK(thermal_occupation(omega, t_ln2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(thermal_occupation(omega, 1.0) == doctest::Approx(2083.16195360314904072194319183).epsilon(1e-12));

    // Classical limit: nbar = kT/(hbar w) - 1/2 + O(hbar w / kT).
    const double t_hot = 60.0 * PhysicalConstants::hbar * omega / PhysicalConstants::boltzmann;
    CHECK(thermal_occupation(omega, t_hot) == doctest::Approx(60.0).epsilon(0.01));
  }

  TEST_CASE("rejects non-positive inputs naming the field") {
    const auto expect_field = [](SystemParams p, const char* field) {
      try {
        (void)derive(p);
        FAIL("expected a domain error");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::domain);
        CHECK(std::string(e.what()).find(field) != std::string::npos);
      }
    };
    SystemParams p = reference_device();
    p.cavity_length = 0;
    expect_field(p, "cavity_length");
    p = reference_device();
    p.mirror_mass = -1;
    expect_field(p, "mirror_mass");
    p = reference_device();
    p.mechanical_freq = 0;
    expect_field(p, "mechanical_freq");
    p = reference_device();
    p.cavity_decay = 0;
    expect_field(p, "cavity_decay");
    p = reference_device();
    p.laser_wavelength = 0;
    expect_field(p, "laser_wavelength");
    p = reference_device();
    p.temperature = -1;
    expect_field(p, "temperature");
  }

  TEST_CASE("monotonicity and purity") {
    SystemParams p = reference_device();
    double last_e = -1;
    for (double power : {1e-6, 1e-3, 0.05, 1.0, 10.0}) {
      p.input_power = power;
      const double e = derive(p).drive_amplitude;
      CHECK(e > last_e);
      last_e = e;
    }
    p = reference_device();
    double last_g0 = INFINITY;
    for (double mass : {1e-15, 1e-12, 5e-12, 1e-9}) {
      p.mirror_mass = mass;
      const double g0 = derive(p).single_photon_coupling;
      CHECK(g0 < last_g0);
      last_g0 = g0;
    }
    p = reference_device();
    p.temperature = 0.3;
    const DerivedParams a = derive(p), b = derive(p);
    CHECK(a.single_photon_coupling == b.single_photon_coupling);
    CHECK(a.drive_amplitude == b.drive_amplitude);
    CHECK(a.thermal_occupation == b.thermal_occupation);

    double last_n = 0;
    for (double t : {1e-4, 1e-3, 0.01, 0.1, 1.0, 300.0}) {
      const double n = thermal_occupation(p.mechanical_freq, t);
      CHECK(n > last_n);
      last_n = n;
    }
  }
}
