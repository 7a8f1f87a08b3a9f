#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optomech/noise.hpp"
#include "optomech/params.hpp"

namespace optomech {

/// One sweep axis, in configuration units (Hz, W, K).
struct Axis {
  std::string key;
  double start = 0;
  double stop = 0;
  std::size_t count = 1;
  bool logarithmic = false;

  std::vector<double> values() const;
};

enum class BranchPolicy { all, lowest, continuity };
enum class OutputFormat { csv, json };

struct SweepConfig {
  SystemParams base;
  NoiseModel noise;
  std::vector<Axis> axes;  // at most two; the first is the outer loop
  BranchPolicy policy = BranchPolicy::all;
  std::size_t workers = 1;
  std::string output = "-";
  OutputFormat format = OutputFormat::csv;
  std::size_t eta_bins = 60;
  std::size_t detuning_bins = 60;
};

/// Description of a recognised configuration key.
struct ConfigKey {
  const char* name;
  const char* unit;
  const char* help;
  bool physical;   // maps to SystemParams or NoiseModel
  bool sweepable;  // may be named by axis1/axis2
};

const std::vector<ConfigKey>& config_keys();

/// Line-oriented `key = value` text. `#` starts a comment. Later assignments win, so
/// command-line overrides are applied with set() after load().
class ConfigFile {
 public:
  void load(const std::string& path);
  void parse(std::istream& in, const std::string& origin = "<input>");
  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  /// Validates and converts. Frequencies given in Hz become rad/s. Every physical key
  /// is required; there are no silent defaults.
  SweepConfig to_sweep_config() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Assign one physical key (configuration units) onto params/noise.
void assign_physical(SystemParams& params, NoiseModel& noise, const std::string& key,
                     double value);

Axis parse_axis(const std::string& text);

}  // namespace optomech
