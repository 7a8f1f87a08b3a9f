// Command-line front end. Talks to the solver exclusively through the C API.
#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optomech/optomech.h"

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kNumerical = 3 };

int exit_code(om_status st) {
  switch (st) {
    case OM_OK: return kOk;
    case OM_ERR_IO: return kIo;
    case OM_ERR_NUMERICAL:
    case OM_ERR_INTERNAL: return kNumerical;
    default: return kConfig;
  }
}

struct Failure {
  int code;
};

void check(om_status st, const std::string& context) {
  if (st == OM_OK) return;
  std::cerr << "optomech: " << context << ": " << om_last_error() << '\n';
  throw Failure{exit_code(st)};
}

// Owning wrappers around the opaque handles.
struct Config {
  om_config* h = nullptr;
  Config() { check(om_config_create(&h), "config"); }
  ~Config() { om_config_destroy(h); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  void set(const std::string& k, const std::string& v) { check(om_config_set(h, k.c_str(), v.c_str()), k); }
  std::optional<std::string> get(const std::string& k) const {
    char buf[512];
    int found = 0;
    check(om_config_get(h, k.c_str(), buf, sizeof buf, &found), k);
    if (!found) return std::nullopt;
    return std::string(buf);
  }
};

struct Records {
  om_records* h = nullptr;
  Records() = default;
  ~Records() { om_records_destroy(h); }
  Records(const Records&) = delete;
  Records& operator=(const Records&) = delete;
};

struct Raster {
  om_raster* h = nullptr;
  ~Raster() { om_raster_destroy(h); }
};

// Reference device; frequencies in Hz.
const std::map<std::string, std::string> kReferenceDevice = {
    {"cavity_length_m", "1e-3"},        {"mirror_mass_kg", "5e-12"},
    {"mechanical_frequency_hz", "10e6"}, {"mechanical_damping_hz", "100"},
    {"cavity_decay_hz", "14e6"},         {"laser_wavelength_m", "810e-9"},
    {"input_power_w", "0.05"},
};

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;
  std::string output = "-";
  std::string format;
};

void apply(Config& cfg, const Options& opt, const std::map<std::string, std::string>& preset) {
  for (const auto& [k, v] : preset) cfg.set(k, v);
  if (!opt.config_path.empty()) check(om_config_load_file(cfg.h, opt.config_path.c_str()), "config file");
  for (const auto& [k, v] : opt.flags) cfg.set(k, v);
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "optomech: --set expects key=value, got '" << kv << "'\n";
      throw Failure{kConfig};
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!opt.format.empty()) cfg.set("format", opt.format);
}

void require(const Config& cfg, const char* key, const char* why) {
  if (!cfg.get(key)) {
    std::cerr << "optomech: " << key << " is required (" << why << ")\n";
    throw Failure{kConfig};
  }
}

void write(const Records& recs, const Config& cfg, const std::string& fallback_output) {
  const std::string format = cfg.get("format").value_or("csv");
  const std::string output = cfg.get("output").value_or(fallback_output);
  check(om_records_write(recs.h, format.c_str(), output.c_str()), "write " + output);
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("-c,--config", opt.config_path, "key = value configuration file");
  sub->add_option("--set", opt.overrides, "override a configuration key (key=value)");
  sub->add_option("-f,--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  for (size_t i = 0; i < om_config_key_count(); ++i) {
    const std::string name = om_config_key_name(i);
    if (name == "format") continue;  // -f,--format above
    std::string help = om_config_key_help(i);
    if (const std::string unit = om_config_key_unit(i); !unit.empty()) help += " [" + unit + "]";
    sub->add_option_function<std::string>(
        "--" + name, [&opt, name](const std::string& v) { opt.flags[name] = v; }, help);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state optomechanics with laser phase noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(om_version()));

  Options opt;
  auto* steady = app.add_subcommand("steady", "all steady-state branches at one parameter point");
  auto* sweep = app.add_subcommand("sweep", "grid sweep over up to two axes");
  auto* fig1 = app.add_subcommand("fig1", "power hysteresis of the intracavity photon number");
  auto* fig2 = app.add_subcommand("fig2", "N/kappa and eta versus detuning for two linewidths");
  auto* fig3 = app.add_subcommand("fig3", "log-negativity rasters over (eta, Delta/omega_m)");
  auto* checks = app.add_subcommand("check", "run the built-in oracle comparisons");
  for (auto* sub : {steady, sweep, fig1, fig2, fig3}) add_common(sub, opt);

  std::vector<double> fig3_linewidths = {0, 10, 100};
  std::string fig3_prefix = "fig3";
  std::string fig3_records;
  fig3->add_option("--linewidths", fig3_linewidths, "linewidths in Hz, one raster each")->delimiter(',');
  fig3->add_option("--prefix", fig3_prefix, "raster files are written to <prefix>_linewidth_<Hz>.csv");
  fig3->add_option("--records", fig3_records, "also write the raw sweep records here");

  std::uint64_t seed = 20110101;
  std::size_t samples = 200;
  std::string check_output = "-";
  checks->add_option("--seed", seed, "random seed");
  checks->add_option("--samples", samples, "random systems per comparison");
  checks->add_option("-o,--output", check_output, "report path, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*checks) {
      const om_status st = om_self_check(seed, samples, check_output.c_str());
      if (st != OM_OK) std::cerr << "optomech: check: " << om_last_error() << '\n';
      return st == OM_OK ? kOk : (st == OM_ERR_NUMERICAL ? kNumerical : exit_code(st));
    }

    Config cfg;
    if (*steady) {
      apply(cfg, opt, {});
      Records recs;
      check(om_run_steady(cfg.h, &recs.h), "steady");
      write(recs, cfg, "-");
    } else if (*sweep) {
      apply(cfg, opt, {});
      Records recs;
      check(om_run_sweep(cfg.h, &recs.h), "sweep");
      write(recs, cfg, "-");
    } else if (*fig1) {
      auto preset = kReferenceDevice;
      preset["detuning_hz"] = "26.6e6";
      preset["temperature_k"] = "0";
      preset["linewidth_hz"] = "0";
      preset["correlation_rate_hz"] = "1e6";
      preset["axis1"] = "input_power_w lin 0.03 0.062 3201";
      apply(cfg, opt, preset);
      Records recs;
      check(om_run_hysteresis(cfg.h, &recs.h), "fig1");
      write(recs, cfg, "-");
    } else if (*fig2) {
      auto preset = kReferenceDevice;
      preset["detuning_hz"] = "0";
      preset["temperature_k"] = "0";
      preset["linewidth_hz"] = "30";
      preset["axis1"] = "detuning_hz lin 0 40e6 801";
      preset["axis2"] = "linewidth_hz lin 30 100 2";
      apply(cfg, opt, preset);
      require(cfg, "correlation_rate_hz", "the phase-noise correlation rate is not fixed by the model");
      Records recs;
      check(om_run_sweep(cfg.h, &recs.h), "fig2");
      write(recs, cfg, "-");
    } else if (*fig3) {
      auto preset = kReferenceDevice;
      preset["detuning_hz"] = "0";
      preset["axis1"] = "input_power_w log 1e-3 10 200";
      preset["axis2"] = "detuning_hz lin 0.7e6 50e6 200";
      preset["workers"] = "4";
      apply(cfg, opt, preset);
      require(cfg, "correlation_rate_hz", "the phase-noise correlation rate is not fixed by the model");
      require(cfg, "temperature_k", "the bath temperature is not fixed by the model");
      const std::size_t eta_bins = std::stoul(cfg.get("eta_bins").value_or("60"));
      const std::size_t det_bins = std::stoul(cfg.get("detuning_bins").value_or("60"));
      Records merged;
      bool first = true;
      for (double lw : fig3_linewidths) {
        std::ostringstream v;
        v.precision(17);
        v << lw;
        cfg.set("linewidth_hz", v.str());
        Records recs;
        check(om_run_sweep(cfg.h, &recs.h), "fig3 sweep");
        Raster raster;
        check(om_fig3_regrid(recs.h, eta_bins, det_bins, &raster.h), "fig3 regrid");
        const std::string path = fig3_prefix + "_linewidth_" + v.str() + "hz.csv";
        check(om_raster_write(raster.h, path.c_str()), "write " + path);
        std::cerr << "wrote " << path << '\n';
        if (!fig3_records.empty()) {
          if (first) {
            std::swap(merged.h, recs.h);
            first = false;
          } else {
            check(om_records_append(merged.h, recs.h), "collect records");
          }
        }
      }
      if (!fig3_records.empty() && merged.h) {
        const std::string format = cfg.get("format").value_or("csv");
        check(om_records_write(merged.h, format.c_str(), fig3_records.c_str()), "write " + fig3_records);
      }
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
