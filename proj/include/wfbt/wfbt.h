#ifndef WFBT_WFBT_H
#define WFBT_WFBT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WFBT_API __declspec(dllexport)
#else
#define WFBT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; nonzero values equal the CLI exit codes. */
typedef enum wfbt_status {
    WFBT_OK = 0,
    WFBT_ERR_CONFIG = 1,
    WFBT_ERR_DATA = 2,
    WFBT_ERR_ENGINE = 3
} wfbt_status;

typedef struct wfbt_run wfbt_run;

/* Strings returned through char** out-parameters are owned by the caller and
   released with wfbt_free_string. */
WFBT_API const char* wfbt_version(void);

/* Message of the last failure on the calling thread, or "". */
WFBT_API const char* wfbt_last_error(void);

WFBT_API void wfbt_free_string(char* s);

/* Parses and validates a JSON run config; returns its canonical form. */
WFBT_API wfbt_status wfbt_config_normalize(const char* config_json, char** out_json);

/* Loads the configured candles, checks them and returns canonical CSV. */
WFBT_API wfbt_status wfbt_ingest(const char* config_json, char** out_csv);

/* Feature/label CSV for the configured data. */
WFBT_API wfbt_status wfbt_features(const char* config_json, char** out_csv);

/* `timestamp,value` CSV of one indicator (acc_dist, mfi, bb_middle, bb_upper,
   bb_lower, bb_bandwidth, kc_width, sar). */
WFBT_API wfbt_status wfbt_indicator(const char* config_json, const char* name, char** out_csv);

/* Single-model study using the config's tuner settings (100 trials when the
   config has none). Either output pointer may be NULL. */
WFBT_API wfbt_status wfbt_tune(const char* config_json, const char* model, size_t window, char** out_trials_jsonl,
                               char** out_best_json);

/* Full experiment, persisted under the config's output directory. */
WFBT_API wfbt_status wfbt_run_experiment(const char* config_json, wfbt_run** out_run);

/* Reopens a persisted run directory. */
WFBT_API wfbt_status wfbt_run_open(const char* run_dir, wfbt_run** out_run);

WFBT_API void wfbt_run_free(wfbt_run* run);

/* Borrowed; valid until wfbt_run_free. */
WFBT_API const char* wfbt_run_dir(const wfbt_run* run);

WFBT_API size_t wfbt_run_report_count(const wfbt_run* run);

WFBT_API wfbt_status wfbt_run_report_json(const wfbt_run* run, char** out_json);

/* task is "classifier" or "regressor"; reports of the other task are skipped. */
WFBT_API wfbt_status wfbt_run_table(const wfbt_run* run, const char* task, char** out_text);

/* segment is "backtest" or "forward". */
WFBT_API wfbt_status wfbt_run_export_equity(const wfbt_run* run, const char* model, size_t window,
                                            const char* segment, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif
