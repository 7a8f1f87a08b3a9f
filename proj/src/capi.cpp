#include <algorithm>
#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/error.hpp"
#include "optomech/optomech.h"
#include "optomech/self_check.hpp"
#include "optomech/sweep.hpp"

struct om_config {
  optomech::ConfigFile file;
};

struct om_records {
  std::vector<optomech::SweepRecord> records;
};

struct om_raster {
  optomech::Raster raster;
};

namespace {

thread_local std::string g_last_error;

// Caller misuse of an otherwise valid handle.
struct BadArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

om_status to_status(optomech::ErrorCode code) {
  switch (code) {
    case optomech::ErrorCode::domain: return OM_ERR_DOMAIN;
    case optomech::ErrorCode::numerical: return OM_ERR_NUMERICAL;
    case optomech::ErrorCode::config: return OM_ERR_CONFIG;
    case optomech::ErrorCode::io: return OM_ERR_IO;
    case optomech::ErrorCode::internal: return OM_ERR_INTERNAL;
  }
  return OM_ERR_INTERNAL;
}

template <class Fn>
om_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return OM_OK;
  } catch (const optomech::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const BadArgument& e) {
    g_last_error = e.what();
    return OM_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OM_ERR_INTERNAL;
  }
}

om_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return OM_ERR_ARGUMENT;
}

optomech::OutputFormat parse_format(const char* format) {
  const std::string f = format ? format : "csv";
  if (f == "csv") return optomech::OutputFormat::csv;
  if (f == "json") return optomech::OutputFormat::json;
  throw BadArgument("format must be csv or json");
}

}  // namespace

extern "C" {

const char* om_version(void) { return "0.1.0"; }

const char* om_last_error(void) { return g_last_error.c_str(); }

om_status om_config_create(om_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new om_config{}; });
}

void om_config_destroy(om_config* cfg) { delete cfg; }

om_status om_config_load_file(om_config* cfg, const char* path) {
  if (!cfg || !path) return null_argument("cfg/path");
  return guarded([&] { cfg->file.load(path); });
}

om_status om_config_parse(om_config* cfg, const char* text) {
  if (!cfg || !text) return null_argument("cfg/text");
  return guarded([&] {
    std::istringstream in(text);
    cfg->file.parse(in);
  });
}

om_status om_config_set(om_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return null_argument("cfg/key/value");
  return guarded([&] { cfg->file.set(key, value); });
}

om_status om_config_get(const om_config* cfg, const char* key, char* buf, size_t len,
                        int* found) {
  if (!cfg || !key || !found) return null_argument("cfg/key/found");
  return guarded([&] {
    const auto v = cfg->file.get(key);
    *found = v ? 1 : 0;
    if (v && buf && len > 0) {
      const size_t n = std::min(len - 1, v->size());
      std::memcpy(buf, v->data(), n);
      buf[n] = '\0';
    }
  });
}

om_status om_config_validate(const om_config* cfg) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] { (void)cfg->file.to_sweep_config(); });
}

size_t om_config_key_count(void) { return optomech::config_keys().size(); }

const char* om_config_key_name(size_t index) {
  const auto& keys = optomech::config_keys();
  return index < keys.size() ? keys[index].name : nullptr;
}

const char* om_config_key_help(size_t index) {
  const auto& keys = optomech::config_keys();
  return index < keys.size() ? keys[index].help : nullptr;
}

const char* om_config_key_unit(size_t index) {
  const auto& keys = optomech::config_keys();
  return index < keys.size() ? keys[index].unit : nullptr;
}

om_status om_run_steady(const om_config* cfg, om_records** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded([&] {
    optomech::SweepConfig sc = cfg->file.to_sweep_config();
    auto recs = std::make_unique<om_records>();
    recs->records = optomech::evaluate_point(sc.base, sc.noise, optomech::BranchPolicy::all);
    *out = recs.release();
  });
}

om_status om_run_sweep(const om_config* cfg, om_records** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded([&] {
    const optomech::SweepConfig sc = cfg->file.to_sweep_config();
    auto recs = std::make_unique<om_records>();
    recs->records = optomech::run_sweep(sc);
    *out = recs.release();
  });
}

om_status om_run_hysteresis(const om_config* cfg, om_records** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded([&] {
    optomech::SweepConfig sc = cfg->file.to_sweep_config();
    if (sc.axes.size() != 1 || sc.axes[0].key != "input_power_w") {
      optomech::fail(optomech::ErrorCode::config,
                     "hysteresis needs exactly one axis over input_power_w");
    }
    const std::vector<double> powers = sc.axes[0].values();
    for (size_t i = 1; i < powers.size(); ++i) {
      if (!(powers[i] > powers[i - 1])) {
        optomech::fail(optomech::ErrorCode::config,
                       "hysteresis power axis must be strictly ascending");
      }
    }
    sc.policy = optomech::BranchPolicy::continuity;
    auto recs = std::make_unique<om_records>();
    recs->records = optomech::run_sweep(sc);
    *out = recs.release();
  });
}

void om_records_destroy(om_records* recs) { delete recs; }

size_t om_records_count(const om_records* recs) { return recs ? recs->records.size() : 0; }

om_status om_records_append(om_records* dst, const om_records* src) {
  if (!dst || !src) return null_argument("dst/src");
  return guarded([&] {
    dst->records.insert(dst->records.end(), src->records.begin(), src->records.end());
  });
}

om_status om_records_get(const om_records* recs, size_t index, const char* field,
                         double* value, int* present) {
  if (!recs || !field || !value || !present) return null_argument("recs/field/value/present");
  return guarded([&] {
    if (index >= recs->records.size()) {
      throw BadArgument("record index out of range");
    }
    for (const auto& col : optomech::record_columns()) {
      if (std::strcmp(col.name, field) != 0) continue;
      const optomech::Cell c = col.get(recs->records[index]);
      *present = 1;
      if (const double* d = std::get_if<double>(&c)) {
        *value = *d;
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) {
        *value = static_cast<double>(*i);
      } else {
        *present = 0;
        *value = 0;
      }
      return;
    }
    throw BadArgument(std::string("unknown record field '") + field + "'");
  });
}

om_status om_records_write(const om_records* recs, const char* format, const char* path) {
  if (!recs || !path) return null_argument("recs/path");
  return guarded([&] { optomech::emit(recs->records, parse_format(format), std::string(path)); });
}

size_t om_record_column_count(void) { return optomech::record_columns().size(); }

const char* om_record_column_name(size_t index) {
  const auto& cols = optomech::record_columns();
  return index < cols.size() ? cols[index].name : nullptr;
}

om_status om_fig3_regrid(const om_records* recs, size_t eta_bins, size_t detuning_bins,
                         om_raster** out) {
  if (!recs || !out) return null_argument("recs/out");
  return guarded([&] {
    auto r = std::make_unique<om_raster>();
    r->raster = optomech::fig3_regrid(recs->records, eta_bins, detuning_bins);
    *out = r.release();
  });
}

void om_raster_destroy(om_raster* raster) { delete raster; }

om_status om_raster_cell(const om_raster* raster, size_t eta_bin, size_t detuning_bin,
                         double* eta, double* delta_over_omega_m, double* max_log_neg,
                         int* present) {
  if (!raster || !present) return null_argument("raster/present");
  return guarded([&] {
    const auto& r = raster->raster;
    if (eta_bin >= r.eta_bins || detuning_bin >= r.detuning_bins) {
      throw BadArgument("raster bin out of range");
    }
    if (eta) *eta = r.eta_center(eta_bin);
    if (delta_over_omega_m) *delta_over_omega_m = r.detuning_center(detuning_bin);
    const auto& cell = r.at(eta_bin, detuning_bin);
    *present = cell ? 1 : 0;
    if (max_log_neg) *max_log_neg = cell ? *cell : 0.0;
  });
}

om_status om_raster_write(const om_raster* raster, const char* path) {
  if (!raster || !path) return null_argument("raster/path");
  return guarded([&] { optomech::emit_raster(raster->raster, std::string(path)); });
}

om_status om_self_check(uint64_t seed, size_t samples, const char* path) {
  if (!path) return null_argument("path");
  bool all_passed = true;
  const om_status st = guarded([&] {
    std::ostringstream report;
    for (const auto& r : optomech::run_self_check(seed, samples)) {
      all_passed = all_passed && r.passed;
      report << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << '\n';
    }
    const std::string text = report.str();
    if (std::string(path) == "-") {
      std::fputs(text.c_str(), stdout);
      std::fflush(stdout);
    } else {
      std::FILE* f = std::fopen(path, "w");
      if (!f) optomech::fail(optomech::ErrorCode::io, std::string("cannot open '") + path + "'");
      std::fputs(text.c_str(), f);
      std::fclose(f);
    }
  });
  if (st != OM_OK) return st;
  if (!all_passed) {
    g_last_error = "one or more oracle checks failed";
    return OM_ERR_NUMERICAL;
  }
  return OM_OK;
}

}  // extern "C"
