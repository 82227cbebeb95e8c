/* C ABI for the gaze-effort library. Generated by cbindgen; do not edit. */

#ifndef GAZE_EFFORT_H
#define GAZE_EFFORT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum GeStatus {
  GE_STATUS_OK = 0,
  // A required pointer argument was null.
  GE_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  GE_STATUS_INVALID_UTF8 = 2,
  GE_STATUS_IO = 3,
  // Malformed input file; the message carries the line number.
  GE_STATUS_PARSE = 4,
  GE_STATUS_SCHEMA_VERSION = 5,
  GE_STATUS_CONFIG = 6,
  GE_STATUS_EMPTY_INPUT = 7,
  // The data is degenerate for the requested quantity (zero variance,
  // zero flow, constant speed).
  GE_STATUS_DEGENERATE = 8,
  // A required channel (AOI labels, pupil, speed) is absent.
  GE_STATUS_MISSING_DATA = 9,
  // Too few samples, fixations, or rows.
  GE_STATUS_INSUFFICIENT_DATA = 10,
  // A synthetic scenario is infeasible.
  GE_STATUS_INFEASIBLE = 11,
  // Internal computation error.
  GE_STATUS_COMPUTE = 12,
  // A panic was caught at the boundary.
  GE_STATUS_PANIC = 13,
} GeStatus;

// Which metric to read from a [`GeMetrics`] handle.
typedef enum GeMetricField {
  GE_METRIC_FIELD_CEM_VI = 0,
  GE_METRIC_FIELD_CEM_IQ = 1,
  GE_METRIC_FIELD_SGE = 2,
  GE_METRIC_FIELD_ENTROPY_RATE = 3,
  GE_METRIC_FIELD_CHECK_RATE = 4,
  GE_METRIC_FIELD_FIXATION_RATE = 5,
  GE_METRIC_FIELD_PUPIL_SIZE_CHANGE = 6,
  GE_METRIC_FIELD_DRIVING_PERFORMANCE = 7,
  GE_METRIC_FIELD_SRJSD_F = 8,
  GE_METRIC_FIELD_SRJSD_FS = 9,
} GeMetricField;

// Opaque pipeline configuration handle.
typedef struct GeConfig GeConfig;

// Opaque per-trial metrics handle.
typedef struct GeMetrics GeMetrics;

// Opaque trial handle.
typedef struct GeTrial GeTrial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *ge_version(void);

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *ge_last_error_message(void);

// Default configuration. Never fails.
struct GeConfig *ge_config_default(void);

// Loads a configuration file.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum GeStatus ge_config_load(const char *path, struct GeConfig **out);

// # Safety
// `config` must come from this library and not be freed twice.
void ge_config_free(struct GeConfig *config);

// Parses a gaze log into a trial handle.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum GeStatus ge_trial_load(const char *path, struct GeTrial **out);

// # Safety
// `trial` must come from this library and not be freed twice.
void ge_trial_free(struct GeTrial *trial);

// Number of raw samples in a trial; 0 for a null handle.
//
// # Safety
// `trial` must be a live handle from this library, or null.
size_t ge_trial_sample_count(const struct GeTrial *trial);

// Fixations detected so far (populated by `ge_metrics_compute`).
//
// # Safety
// `trial` must be a live handle from this library, or null.
size_t ge_trial_fixation_count(const struct GeTrial *trial);

// Number of invariant violations in a trial; 0 for a well-formed trial.
//
// # Safety
// `trial` must be a live handle from this library, or null.
size_t ge_trial_validate(const struct GeTrial *trial);

// Detects fixations, runs the geometry pass, and computes all per-trial
// metrics. `config` may be null for defaults.
//
// # Safety
// Handles must be live; `out` must be a valid pointer.
enum GeStatus ge_metrics_compute(struct GeTrial *trial,
                                 const struct GeConfig *config,
                                 struct GeMetrics **out);

// # Safety
// `metrics` must come from this library and not be freed twice.
void ge_metrics_free(struct GeMetrics *metrics);

// Reads one metric. Returns `Ok` and writes the value; `Degenerate` and
// writes +infinity for a tagged-infinite metric; `MissingData` (value
// untouched) for a tagged-missing one, with the reason in the last error.
//
// # Safety
// `metrics` must be a live handle and `out` a valid pointer.
enum GeStatus ge_metrics_get(const struct GeMetrics *metrics,
                             enum GeMetricField field,
                             double *out);

// Writes the trial id into `buf` (NUL-terminated, truncating). Returns the
// full length of the id in bytes, excluding the terminator.
//
// # Safety
// `metrics` must be a live handle; `buf` must hold `len` writable bytes.
size_t ge_metrics_trial_id(const struct GeMetrics *metrics, char *buf, size_t len);

// Runs the full pipeline over trial files and writes `metrics.csv` plus,
// when enough complete rows exist, `report.csv` and `report.md` into
// `out_dir`. `config` may be null for defaults.
//
// # Safety
// `paths` must point to `n_paths` valid C strings; `out_dir` must be a
// valid C string.
enum GeStatus ge_run_report(const char *const *paths,
                            size_t n_paths,
                            const struct GeConfig *config,
                            const char *out_dir,
                            bool strict);

// Generates a synthetic corpus plus its expectation ledger. `preset` is
// one of "balanced", "concentrated", "mixed".
//
// # Safety
// `preset` and `out_dir` must be valid C strings.
enum GeStatus ge_simulate_corpus(const char *preset,
                                 size_t n_trials,
                                 uint64_t seed,
                                 double jitter_deg,
                                 const char *out_dir,
                                 const struct GeConfig *config);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAZE_EFFORT_H */
