#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/error.hpp"
#include "optomech/steady_state.hpp"
#include "oracles.hpp"

using namespace optomech;
using fixture::kTwoPi;

TEST_SUITE("steady_state") {
  TEST_CASE("undriven cavity has a single trivial branch") {
    SystemParams p = fixture::reference_device();
    p.input_power = 0;
    p.detuning = 0.7 * p.cavity_decay;
    const auto b = solve_branches(p, derive(p));
    REQUIRE(b.size() == 1);
    CHECK(b[0].photons == 0.0);
    CHECK(std::abs(b[0].alpha) == 0.0);
    CHECK(b[0].q_s == 0.0);
    CHECK(b[0].p_s == 0.0);
    CHECK(b[0].eta == 1.0);
  }

  TEST_CASE("decoupled cavity is a Lorentzian") {
    SystemParams p = fixture::reference_device();
    p.detuning = 0.8 * p.cavity_decay;
    DerivedParams d = derive(p);
    d.single_photon_coupling = 0;
    const auto b = solve_branches(p, d);
    REQUIRE(b.size() == 1);
    const std::complex<double> expected =
        d.drive_amplitude / std::complex<double>(p.cavity_decay, p.detuning);
    CHECK(std::abs(b[0].alpha - expected) <= 1e-14 * std::abs(expected));
    CHECK(b[0].q_s == 0.0);
    CHECK(b[0].eta == 1.0);
  }

  TEST_CASE("bistability parameter boundary values") {
    CHECK(bistability_parameter(0, 2, 3, 4) == 1.0);
    CHECK(bistability_parameter(5, 0, 3, 4) == 1.0);
    // G^2 Delta = omega_m (kappa^2 + Delta^2) = 4
    const double omega_m = 2, kappa = 1, delta = 1;
    CHECK(bistability_parameter(2, delta, kappa, omega_m) == 0.0);
    CHECK(bistability_parameter(3, -1, 1, 1) > 1.0);  // blue side is not clamped
  }

  TEST_CASE("root count matches a dense sign-change scan") {
    SystemParams p = fixture::reference_device();
    bool saw_three = false;
    for (double power : {0.01, 0.05, 0.058, 0.2, 1.0}) {
      for (int k = 0; k <= 40; ++k) {
        p.input_power = power;
        p.detuning = p.cavity_decay * 0.1 * k;
        const DerivedParams d = derive(p);
        const auto b = solve_branches(p, d);
        const int expected = oracle::cubic_root_count(p, d, 20000);
        if (b.size() == 2) continue;  // tangency; the scan cannot resolve a double root
        CHECK_MESSAGE(static_cast<int>(b.size()) == expected, "P=", power, " k=", k);
        saw_three = saw_three || b.size() == 3;
      }
    }
    CHECK(saw_three);
  }

  TEST_CASE("reference power has a tristable detuning window") {
    // At P = 50 mW the scaled drive sits just below the cusp, so raise it slightly.
    SystemParams p = fixture::reference_device();
    p.input_power = 0.058;
    int windows = 0;
    for (int k = 0; k <= 400; ++k) {
      p.detuning = p.cavity_decay * 0.01 * k;
      const DerivedParams d = derive(p);
      const auto b = solve_branches(p, d);
      if (b.size() == 3) {
        ++windows;
        CHECK(oracle::cubic_root_count(p, d) == 3);
      }
    }
    CHECK(windows > 0);
  }

  TEST_CASE("fixed-point residuals and record invariants") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    SystemParams p = fixture::reference_device();
    for (int i = 0; i < 300; ++i) {
      p.input_power = std::pow(10.0, -4 + 5 * u(rng));
      p.detuning = p.cavity_decay * (-2 + 6 * u(rng));
      const DerivedParams d = derive(p);
      const auto branches = solve_branches(p, d);
      REQUIRE(!branches.empty());
      REQUIRE(branches.size() <= 3);
      for (std::size_t k = 0; k < branches.size(); ++k) {
        const SteadyState& s = branches[k];
        CHECK(s.residual_amplitude < 1e-9);
        CHECK(s.residual_position < 1e-9);
        CHECK(std::abs(photon_cubic(p, d, s.photons)) <=
              1e-9 * d.drive_amplitude * d.drive_amplitude);
        CHECK(s.p_s == 0.0);
        CHECK(s.branch_index == static_cast<int>(k));
        CHECK(s.coupling == doctest::Approx(std::sqrt(2.0) * d.single_photon_coupling * std::abs(s.alpha)).epsilon(1e-9));
        if (k > 0) CHECK(s.photons >= branches[k - 1].photons);
      }
    }
  }

  TEST_CASE("stability agrees with eta on red-detuned branches") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    SystemParams p = fixture::reference_device();
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
      p.input_power = std::pow(10.0, -3 + 2 * u(rng));
      p.detuning = p.cavity_decay * 4 * u(rng);
      for (const SteadyState& s : solve_branches(p, derive(p))) {
        if (s.delta <= 0 || s.tangent || std::abs(s.eta) < 1e-7) continue;
        CHECK(s.stable == (s.eta > 0 && s.eta < 1));
        ++checked;
      }
    }
    CHECK(checked > 1000);
  }

  TEST_CASE("hysteresis below threshold retraces itself") {
    SystemParams p = fixture::reference_device();
    p.detuning = kTwoPi * 26.6e6;
    std::vector<double> powers;
    for (int i = 0; i < 200; ++i) powers.push_back(1e-3 + 1e-4 * i);  // up to 21 mW
    const HysteresisTrace t = hysteresis_sweep(p, powers);
    const auto up = t.up();
    const auto down = t.down();
    REQUIRE(up.size() == powers.size());
    REQUIRE(down.size() == powers.size());
    for (std::size_t i = 0; i < up.size(); ++i) {
      const auto& back = down[down.size() - 1 - i];
      CHECK(up[i].input_power == back.input_power);
      CHECK(up[i].photons == back.photons);
      CHECK(!up[i].jumped);
    }
  }

  TEST_CASE("hysteresis across the bistable window") {
    SystemParams p = fixture::reference_device();
    p.detuning = kTwoPi * 26.6e6;
    std::vector<double> powers;
    const int n = 3001;
    for (int i = 0; i < n; ++i) powers.push_back(0.05 + 0.0124 * i / (n - 1));
    const HysteresisTrace t = hysteresis_sweep(p, powers);
    const auto up = t.up();
    const auto down = t.down();

    int differing = 0;
    for (std::size_t i = 0; i < up.size(); ++i) {
      const auto& back = down[down.size() - 1 - i];
      if (up[i].branch_index >= 0 && back.branch_index >= 0 &&
          std::abs(up[i].photons - back.photons) > 1e-6 * up[i].photons) {
        ++differing;
      }
    }
    CHECK(differing > 0);

    int jumps = 0;
    for (auto trace : {up, down}) {
      for (std::size_t i = 1; i < trace.size(); ++i) {
        if (!trace[i].jumped) continue;
        ++jumps;
        CHECK(std::abs(trace[i - 1].eta) < 0.02);
      }
    }
    CHECK(jumps == 2);
  }

  TEST_CASE("hysteresis rejects unsorted powers") {
    const std::vector<double> powers = {0.1, 0.05};
    CHECK_THROWS_AS(hysteresis_sweep(fixture::reference_device(), powers), Error);
  }
}
