#pragma once

#include <complex>
#include <span>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

/// One solution of the static radiation-pressure balance.
struct SteadyState {
  std::complex<double> alpha;  // intracavity amplitude E / (kappa + i Delta)
  double photons = 0;          // |alpha|^2
  double q_s = 0;              // G0 |alpha|^2 / omega_m
  double p_s = 0;
  double delta = 0;     // effective detuning Delta_0 - G0 q_s
  double coupling = 0;  // sqrt(2) G0 |alpha|; alpha rotated real and non-negative
  double eta = 1;       // bistability parameter
  int branch_index = 0;
  bool stable = false;      // from the drift-matrix spectrum, not from eta
  bool tangent = false;     // member of a (numerically) double root
  double max_real_eig = 0;  // largest real part of the drift spectrum
  double residual_amplitude = 0;  // |alpha (kappa + i Delta) - E| / E
  double residual_position = 0;   // |q_s - G0 |alpha|^2 / omega_m| / q_s
};

/// 1 - G^2 Delta / (omega_m (kappa^2 + Delta^2)), unclamped.
double bistability_parameter(double coupling, double delta, double kappa, double omega_m);

/// Residual of the photon-number cubic n [kappa^2 + (Delta_0 - G0^2 n / omega_m)^2] - E^2.
double photon_cubic(const SystemParams& params, const DerivedParams& derived, double photons);

/// Expand a photon number into a full SteadyState record (branch_index left at 0).
SteadyState make_steady_state(const SystemParams& params, const DerivedParams& derived,
                              double photons);

/// All real non-negative roots of the photon-number cubic, sorted ascending by |alpha|^2.
/// Throws ErrorCode::numerical if a polished root misses the residual tolerance.
std::vector<SteadyState> solve_branches(const SystemParams& params, const DerivedParams& derived);

struct HysteresisPoint {
  double input_power = 0;
  double photons = 0;
  int branch_index = -1;  // -1 when no stable branch exists at this power
  int branch_count = 0;
  double eta = 0;
  bool ascending = true;
  bool jumped = false;  // the occupied branch ceased to exist before this point
  SteadyState state;
};

struct HysteresisTrace {
  std::vector<HysteresisPoint> points;  // ascending pass followed by the descending pass

  std::span<const HysteresisPoint> up() const;
  std::span<const HysteresisPoint> down() const;  // in descending power order
};

/// Continuity tracker shared by the hysteresis sweep and the sweep module. Starts on
/// the lowest stable branch and follows the nearest stable branch in log photon number.
class BranchFollower {
 public:
  /// Returns the index of the chosen branch in `branches`, or -1 if none is stable.
  int select(std::span<const SteadyState> branches);
  bool jumped() const { return jumped_; }

 private:
  bool started_ = false;
  bool jumped_ = false;
  double last_photons_ = 0;
  int last_index_ = -1;
  std::vector<double> last_roots_;
};

/// Sweep `powers` (strictly ascending) upward and then back down, following branches by
/// continuity. Errors from the solver are rethrown with the offending power attached.
HysteresisTrace hysteresis_sweep(const SystemParams& params, std::span<const double> powers);

}  // namespace optomech
