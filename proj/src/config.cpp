#include "optomech/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "optomech/error.hpp"

namespace optomech {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    fail(ErrorCode::config, "key '" + key + "': '" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v < 1 || v != std::floor(v) || v > 1e8) {
    fail(ErrorCode::config, "key '" + key + "': expected a positive integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

const ConfigKey* find_key(const std::string& name) {
  for (const ConfigKey& k : config_keys()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"cavity_length_m", "m", "cavity length L", true, false},
      {"mirror_mass_kg", "kg", "effective mirror mass m", true, false},
      {"mechanical_frequency_hz", "Hz", "mechanical frequency omega_m / 2pi", true, false},
      {"mechanical_damping_hz", "Hz", "mechanical damping gamma_m / 2pi", true, false},
      {"cavity_decay_hz", "Hz", "cavity amplitude decay kappa / 2pi", true, false},
      {"laser_wavelength_m", "m", "laser wavelength lambda", true, false},
      {"input_power_w", "W", "input laser power P", true, true},
      {"detuning_hz", "Hz", "bare detuning (omega_c - omega_L) / 2pi", true, true},
      {"temperature_k", "K", "bath temperature T", true, true},
      {"linewidth_hz", "Hz", "laser linewidth Gamma_L / 2pi", true, true},
      {"correlation_rate_hz", "Hz", "phase-noise correlation rate gamma_c / 2pi", true, true},
      {"axis1", "", "outer sweep axis: <key> <lin|log> <start> <stop> <count>", false, false},
      {"axis2", "", "inner sweep axis, same syntax", false, false},
      {"branch_policy", "", "all | lowest | continuity", false, false},
      {"workers", "", "worker threads for grid sweeps", false, false},
      {"format", "", "csv | json", false, false},
      {"output", "", "output path, '-' for stdout", false, false},
      {"eta_bins", "", "raster bins along eta (fig3)", false, false},
      {"detuning_bins", "", "raster bins along Delta/omega_m (fig3)", false, false},
  };
  return keys;
}

std::vector<double> Axis::values() const {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = logarithmic ? start * std::pow(stop / start, f) : start + (stop - start) * f;
  }
  out.back() = stop;
  return out;
}

Axis parse_axis(const std::string& text) {
  std::istringstream in(text);
  std::string key, scale, start, stop, count, extra;
  if (!(in >> key >> scale >> start >> stop >> count) || (in >> extra)) {
    fail(ErrorCode::config, "axis '" + text + "': expected <key> <lin|log> <start> <stop> <count>");
  }
  const ConfigKey* k = find_key(key);
  if (k == nullptr || !k->sweepable) {
    fail(ErrorCode::config, "axis '" + text + "': '" + key + "' is not a sweepable parameter");
  }
  Axis axis;
  axis.key = key;
  if (scale == "log") {
    axis.logarithmic = true;
  } else if (scale != "lin") {
    fail(ErrorCode::config, "axis '" + text + "': scale must be lin or log");
  }
  axis.start = parse_number(key, start);
  axis.stop = parse_number(key, stop);
  axis.count = parse_count(key, count);
  if (axis.logarithmic && !(axis.start > 0 && axis.stop > 0)) {
    fail(ErrorCode::config, "axis '" + text + "': log axes need positive endpoints");
  }
  return axis;
}

void assign_physical(SystemParams& p, NoiseModel& n, const std::string& key, double v) {
  if (key == "cavity_length_m") p.cavity_length = v;
  else if (key == "mirror_mass_kg") p.mirror_mass = v;
  else if (key == "mechanical_frequency_hz") p.mechanical_freq = kTwoPi * v;
  else if (key == "mechanical_damping_hz") p.mechanical_damping = kTwoPi * v;
  else if (key == "cavity_decay_hz") p.cavity_decay = kTwoPi * v;
  else if (key == "laser_wavelength_m") p.laser_wavelength = v;
  else if (key == "input_power_w") p.input_power = v;
  else if (key == "detuning_hz") p.detuning = kTwoPi * v;
  else if (key == "temperature_k") p.temperature = v;
  else if (key == "linewidth_hz") n.linewidth = kTwoPi * v;
  else if (key == "correlation_rate_hz") n.correlation_rate = kTwoPi * v;
  else fail(ErrorCode::config, "unknown physical key '" + key + "'");
}

void ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file '" + path + "'");
  parse(in, path);
}

void ConfigFile::parse(std::istream& in, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config,
           origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  if (find_key(key) == nullptr) fail(ErrorCode::config, "unknown key '" + key + "'");
  values_[key] = trim(value);
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

SweepConfig ConfigFile::to_sweep_config() const {
  SweepConfig cfg;
  std::vector<std::string> missing;
  for (const ConfigKey& k : config_keys()) {
    if (!k.physical) continue;
    const auto v = get(k.name);
    if (!v) {
      missing.push_back(k.name);
      continue;
    }
    assign_physical(cfg.base, cfg.noise, k.name, parse_number(k.name, *v));
  }
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m;
    fail(ErrorCode::config, msg);
  }

  for (const char* name : {"axis1", "axis2"}) {
    if (const auto v = get(name); v && !v->empty()) cfg.axes.push_back(parse_axis(*v));
  }
  if (!get("axis1") && get("axis2")) fail(ErrorCode::config, "axis2 given without axis1");
  if (cfg.axes.size() == 2 && cfg.axes[0].key == cfg.axes[1].key) {
    fail(ErrorCode::config, "axis1 and axis2 name the same parameter");
  }

  if (const auto v = get("branch_policy")) {
    if (*v == "all") cfg.policy = BranchPolicy::all;
    else if (*v == "lowest") cfg.policy = BranchPolicy::lowest;
    else if (*v == "continuity") cfg.policy = BranchPolicy::continuity;
    else fail(ErrorCode::config, "branch_policy must be all, lowest or continuity");
  }
  if (cfg.policy == BranchPolicy::continuity && cfg.axes.size() != 1) {
    fail(ErrorCode::config, "branch_policy continuity needs exactly one axis");
  }
  if (const auto v = get("workers")) cfg.workers = parse_count("workers", *v);
  if (const auto v = get("format")) {
    if (*v == "csv") cfg.format = OutputFormat::csv;
    else if (*v == "json") cfg.format = OutputFormat::json;
    else fail(ErrorCode::config, "format must be csv or json");
  }
  if (const auto v = get("output")) cfg.output = *v;
  if (const auto v = get("eta_bins")) cfg.eta_bins = parse_count("eta_bins", *v);
  if (const auto v = get("detuning_bins")) cfg.detuning_bins = parse_count("detuning_bins", *v);

  try {
    validate(cfg.base);
    validate(cfg.noise);
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
  return cfg;
}

}  // namespace optomech
