/* C interface to the optomechanical steady-state solver.
 *
 * All objects are opaque handles owned by the caller and released with the matching
 * _destroy function. Every fallible call returns an om_status; on failure a message for
 * the calling thread is available from om_last_error(). Frequencies in configuration
 * keys are ordinary frequencies in Hz; record fields are angular (rad/s). */
#ifndef OPTOMECH_H
#define OPTOMECH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OM_API __declspec(dllexport)
#else
#define OM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum om_status {
  OM_OK = 0,
  OM_ERR_CONFIG = 1,
  OM_ERR_IO = 2,
  OM_ERR_NUMERICAL = 3,
  OM_ERR_DOMAIN = 4,
  OM_ERR_ARGUMENT = 5,
  OM_ERR_INTERNAL = 6
} om_status;

typedef struct om_config om_config;
typedef struct om_records om_records;
typedef struct om_raster om_raster;

OM_API const char* om_version(void);
OM_API const char* om_last_error(void);

/* Configuration: `key = value` text plus individual overrides. */
OM_API om_status om_config_create(om_config** out);
OM_API void om_config_destroy(om_config* cfg);
OM_API om_status om_config_load_file(om_config* cfg, const char* path);
OM_API om_status om_config_parse(om_config* cfg, const char* text);
OM_API om_status om_config_set(om_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated to len). *found is 0 if unset. */
OM_API om_status om_config_get(const om_config* cfg, const char* key, char* buf, size_t len,
                               int* found);
/* Converts and validates the whole configuration without running anything. */
OM_API om_status om_config_validate(const om_config* cfg);

OM_API size_t om_config_key_count(void);
OM_API const char* om_config_key_name(size_t index);
OM_API const char* om_config_key_help(size_t index);
OM_API const char* om_config_key_unit(size_t index);

/* Pipelines. steady evaluates base parameters only (all branches); sweep honours the
 * configured axes and branch policy; hysteresis runs axis1 (which must be input_power_w)
 * up and down with the continuity policy. */
OM_API om_status om_run_steady(const om_config* cfg, om_records** out);
OM_API om_status om_run_sweep(const om_config* cfg, om_records** out);
OM_API om_status om_run_hysteresis(const om_config* cfg, om_records** out);

OM_API void om_records_destroy(om_records* recs);
OM_API size_t om_records_count(const om_records* recs);
/* Appends all records of `src` to `dst`. */
OM_API om_status om_records_append(om_records* dst, const om_records* src);
/* Numeric field lookup by column name. *present is 0 for absent or non-numeric cells. */
OM_API om_status om_records_get(const om_records* recs, size_t index, const char* field,
                                double* value, int* present);
/* format is "csv" or "json"; path "-" writes to stdout. */
OM_API om_status om_records_write(const om_records* recs, const char* format, const char* path);

OM_API size_t om_record_column_count(void);
OM_API const char* om_record_column_name(size_t index);

/* Max log-negativity over stable records binned on (eta in [0,1], Delta/omega_m). */
OM_API om_status om_fig3_regrid(const om_records* recs, size_t eta_bins, size_t detuning_bins,
                                om_raster** out);
OM_API void om_raster_destroy(om_raster* raster);
OM_API om_status om_raster_cell(const om_raster* raster, size_t eta_bin, size_t detuning_bin,
                                double* eta, double* delta_over_omega_m, double* max_log_neg,
                                int* present);
OM_API om_status om_raster_write(const om_raster* raster, const char* path);

/* Runs the built-in oracle comparisons. The report is written to `path` ("-" for stdout).
 * Returns OM_ERR_NUMERICAL if any comparison fails. */
OM_API om_status om_self_check(uint64_t seed, size_t samples, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* OPTOMECH_H */
