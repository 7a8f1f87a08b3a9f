#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/covariance.hpp"
#include "optomech/entanglement.hpp"
#include "optomech/noise.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

/// Full pipeline output for one (grid point, branch). Blocks that were not computed
/// (unstable branch, failed stage) stay empty and are emitted as absent, never as zero.
struct SweepRecord {
  std::size_t point_index = 0;
  int branch_count = 0;
  std::string direction;  // "up" / "down" under the continuity policy
  bool jumped = false;    // continuity policy: the previously occupied branch vanished
  SystemParams params;
  NoiseModel noise;
  std::optional<DerivedParams> derived;
  std::optional<SteadyState> state;
  std::optional<double> phase_noise;
  bool negative_noise = false;
  std::optional<CovarianceMatrix> covariance;
  std::optional<PhononNumber> phonons;
  std::optional<PhononLimits> limits;
  std::optional<EntanglementResult> entanglement;
  std::string error;

  bool stable() const { return state && state->stable; }
};

/// Evaluate every branch selected by `policy` at one parameter point. Per-stage
/// failures are captured in the records' error field.
std::vector<SweepRecord> evaluate_point(const SystemParams& params, const NoiseModel& noise,
                                        BranchPolicy policy, std::size_t point_index = 0);

/// Row-major over axes (axis1 outer), then branch index. The continuity policy runs the
/// single axis forward and then backward. Results do not depend on cfg.workers.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Column {
  const char* name;
  Cell (*get)(const SweepRecord&);
};

/// Fixed output schema shared by CSV and JSON.
const std::vector<Column>& record_columns();

void emit(const std::vector<SweepRecord>& records, OutputFormat format, std::ostream& out);
/// `path` "-" writes to stdout. Throws ErrorCode::io with the path on failure.
void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::string& path);

/// %.17g, the round-trip format used for every floating value.
std::string format_double(double v);

/// Max log-negativity over stable records binned on (eta, Delta/omega_m).
struct Raster {
  std::size_t eta_bins = 0;
  std::size_t detuning_bins = 0;
  double eta_lo = 0, eta_hi = 1;
  double detuning_lo = 0, detuning_hi = 0;  // Delta / omega_m
  std::vector<std::optional<double>> max_log_negativity;  // eta-major
  std::vector<std::size_t> counts;

  const std::optional<double>& at(std::size_t eta_bin, std::size_t det_bin) const {
    return max_log_negativity[eta_bin * detuning_bins + det_bin];
  }
  double eta_center(std::size_t i) const;
  double detuning_center(std::size_t j) const;
};

/// eta covers [0, 1]; the detuning range spans the populated records unless given.
Raster fig3_regrid(const std::vector<SweepRecord>& records, std::size_t eta_bins = 60,
                   std::size_t detuning_bins = 60,
                   std::optional<std::pair<double, double>> detuning_range = std::nullopt);

void emit_raster(const Raster& raster, std::ostream& out);
void emit_raster(const Raster& raster, const std::string& path);

}  // namespace optomech
