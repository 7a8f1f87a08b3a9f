#include "optomech/steady_state.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "optomech/dynamics.hpp"
#include "optomech/error.hpp"

namespace optomech {

namespace {

// In the scaled unknown x = G0^2 n / (omega_m kappa) the photon-number cubic becomes
//   x^3 - 2 d x^2 + (1 + d^2) x - I = 0,   d = Delta_0 / kappa,  I = E^2 G0^2 / (omega_m kappa^3).
struct ScaledCubic {
  double d;
  double intensity;

  double value(double x) const { return ((x - 2 * d) * x + (1 + d * d)) * x - intensity; }
  double slope(double x) const { return (3 * x - 4 * d) * x + (1 + d * d); }
  double magnitude(double x) const {
    const double ax = std::abs(x);
    return ax * ax * ax + 2 * std::abs(d) * ax * ax + (1 + d * d) * ax + std::abs(intensity);
  }
};

constexpr double kResidualTol = 1e-12;
constexpr double kImagTol = 1e-6;
constexpr double kTangentTol = 1e-6;

double polish(const ScaledCubic& c, double x) {
  for (int it = 0; it < 60; ++it) {
    const double f = c.value(x);
    const double g = c.slope(x);
    if (f == 0 || g == 0) break;
    const double step = f / g;
    const double next = x - step;
    if (!std::isfinite(next)) break;
    if (std::abs(c.value(next)) >= std::abs(f) && it > 2) break;
    x = next;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::vector<double> scaled_roots(const ScaledCubic& c) {
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 0) = 2 * c.d;
  companion(0, 1) = -(1 + c.d * c.d);
  companion(0, 2) = c.intensity;
  companion(1, 0) = 1;
  companion(2, 1) = 1;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::numerical, "companion eigenvalue iteration did not converge");
  }

  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    const double scale = std::max(1.0, std::abs(z));
    const bool near_real = std::abs(z.imag()) <= kImagTol * scale;
    if (!near_real) continue;
    const double x = polish(c, z.real());
    const double residual = std::abs(c.value(x));
    const bool clearly_real = z.imag() == 0.0;
    if (residual > kResidualTol * c.magnitude(x)) {
      // A complex pair just past a fold: not a real root.
      if (!clearly_real) continue;
      std::ostringstream os;
      os << "photon-number cubic root did not converge: relative residual "
         << residual / c.magnitude(x) << " at x = " << x;
      fail(ErrorCode::numerical, os.str());
    }
    if (x < 0) continue;
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

double bistability_parameter(double coupling, double delta, double kappa, double omega_m) {
  return 1.0 - coupling * coupling * delta / (omega_m * (kappa * kappa + delta * delta));
}

double photon_cubic(const SystemParams& p, const DerivedParams& d, double n) {
  const double shift = p.detuning - d.single_photon_coupling * d.single_photon_coupling * n /
                                        p.mechanical_freq;
  return n * (p.cavity_decay * p.cavity_decay + shift * shift) -
         d.drive_amplitude * d.drive_amplitude;
}

SteadyState make_steady_state(const SystemParams& p, const DerivedParams& d, double photons) {
  const double g0 = d.single_photon_coupling;
  const double e = d.drive_amplitude;
  SteadyState s;
  s.photons = photons;
  s.q_s = g0 * photons / p.mechanical_freq;
  s.p_s = 0.0;
  s.delta = p.detuning - g0 * s.q_s;
  s.alpha = e / std::complex<double>(p.cavity_decay, s.delta);
  s.coupling = std::sqrt(2.0) * g0 * std::sqrt(photons);
  s.eta = bistability_parameter(s.coupling, s.delta, p.cavity_decay, p.mechanical_freq);

  if (e > 0) {
    s.residual_amplitude =
        std::abs(s.alpha * std::complex<double>(p.cavity_decay, s.delta) - e) / e;
  }
  const double q_from_alpha = g0 * std::norm(s.alpha) / p.mechanical_freq;
  const double q_scale = std::max(std::abs(s.q_s), std::abs(q_from_alpha));
  if (q_scale > 0) s.residual_position = std::abs(s.q_s - q_from_alpha) / q_scale;

  const StabilityReport st = stability(drift_matrix(s, p));
  s.stable = st.stable;
  s.max_real_eig = st.max_real_part;
  return s;
}

std::vector<SteadyState> solve_branches(const SystemParams& p, const DerivedParams& d) {
  const double g0 = d.single_photon_coupling;
  const double kappa = p.cavity_decay;
  const double e = d.drive_amplitude;

  std::vector<double> photons;
  std::vector<bool> tangent;
  if (e == 0) {
    photons = {0.0};
  } else if (g0 == 0) {
    photons = {e * e / (kappa * kappa + p.detuning * p.detuning)};
  } else {
    const double nonlinearity = g0 * g0 / p.mechanical_freq;  // rad/s per photon
    const ScaledCubic cubic{p.detuning / kappa, e * e * nonlinearity / (kappa * kappa * kappa)};
    for (double x : scaled_roots(cubic)) photons.push_back(x * kappa / nonlinearity);
  }
  tangent.assign(photons.size(), false);
  for (std::size_t i = 1; i < photons.size(); ++i) {
    const double scale = std::max(photons[i], photons[i - 1]);
    if (photons[i] - photons[i - 1] <= kTangentTol * scale) tangent[i] = tangent[i - 1] = true;
  }

  std::vector<SteadyState> out;
  out.reserve(photons.size());
  for (std::size_t i = 0; i < photons.size(); ++i) {
    SteadyState s = make_steady_state(p, d, photons[i]);
    s.branch_index = static_cast<int>(i);
    s.tangent = tangent[i];
    out.push_back(s);
  }
  return out;
}

std::span<const HysteresisPoint> HysteresisTrace::up() const {
  return std::span<const HysteresisPoint>(points).first(points.size() / 2);
}

std::span<const HysteresisPoint> HysteresisTrace::down() const {
  return std::span<const HysteresisPoint>(points).subspan(points.size() / 2);
}

namespace {

double log_distance(double a, double b) {
  constexpr double floor = 1e-300;
  return std::abs(std::log(a + floor) - std::log(b + floor));
}

}  // namespace

int BranchFollower::select(std::span<const SteadyState> branches) {
  jumped_ = false;
  int best = -1;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const SteadyState& b = branches[i];
    if (!b.stable || b.tangent) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      if (!started_) break;
      continue;
    }
    if (log_distance(b.photons, last_photons_) <
        log_distance(branches[best].photons, last_photons_)) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return -1;

  // The occupied branch survived if the chosen root connects back to it rather than to
  // another root of the previous step.
  if (started_ && !last_roots_.empty()) {
    std::size_t nearest = 0;
    for (std::size_t j = 1; j < last_roots_.size(); ++j) {
      if (log_distance(branches[best].photons, last_roots_[j]) <
          log_distance(branches[best].photons, last_roots_[nearest])) {
        nearest = j;
      }
    }
    jumped_ = static_cast<int>(nearest) != last_index_;
  }
  started_ = true;
  last_photons_ = branches[best].photons;
  last_index_ = best;
  last_roots_.clear();
  for (const SteadyState& b : branches) last_roots_.push_back(b.photons);
  return best;
}

HysteresisTrace hysteresis_sweep(const SystemParams& params, std::span<const double> powers) {
  for (std::size_t i = 1; i < powers.size(); ++i) {
    if (!(powers[i] > powers[i - 1])) {
      fail(ErrorCode::domain, "hysteresis power range must be strictly ascending");
    }
  }
  HysteresisTrace trace;
  trace.points.reserve(2 * powers.size());
  BranchFollower follower;

  auto visit = [&](double power, bool ascending) {
    SystemParams p = params;
    p.input_power = power;
    std::vector<SteadyState> branches;
    try {
      branches = solve_branches(p, derive(p));
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " (input power " << power << " W)";
      throw Error(e.code(), os.str());
    }
    HysteresisPoint pt;
    pt.input_power = power;
    pt.ascending = ascending;
    pt.branch_count = static_cast<int>(branches.size());
    const int idx = follower.select(branches);
    pt.branch_index = idx;
    if (idx >= 0) {
      pt.state = branches[idx];
      pt.photons = pt.state.photons;
      pt.eta = pt.state.eta;
      pt.jumped = follower.jumped();
    }
    trace.points.push_back(pt);
  };

  for (double power : powers) visit(power, true);
  for (auto it = powers.rbegin(); it != powers.rend(); ++it) visit(*it, false);
  return trace;
}

}  // namespace optomech
