#ifndef QHL_H
#define QHL_H

/* Generated by cbindgen from qhl-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by fallible accessors.
typedef enum QhlStatus {
  QhlStatus_Ok = 0,
  QhlStatus_NullArgument = 1,
  QhlStatus_InvalidUtf8 = 2,
  QhlStatus_InvalidConfig = 3,
  QhlStatus_RunFailed = 4,
  QhlStatus_IndexOutOfRange = 5,
  QhlStatus_BufferTooSmall = 6,
  QhlStatus_SerializationFailed = 7,
} QhlStatus;

// Opaque parsed run configuration.
typedef struct QhlRunConfig {
  uint8_t _private[0];
} QhlRunConfig;

// Opaque learning-run trace.
typedef struct QhlTrace {
  uint8_t _private[0];
} QhlTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Borrowed description of the most recent failure on this thread; valid
// until the next failing call.  Never NULL.
const char *qhl_last_error_message(void);

// Borrowed static version string.
const char *qhl_version(void);

// Parse a JSON run configuration.  `base_dir` resolves relative paths
// inside the config (channel files) and may be NULL for the current
// directory.  Returns NULL on failure.
//
// # Safety
// `json` must be a NUL-terminated C string; `base_dir` must be NULL or a
// NUL-terminated C string.
struct QhlRunConfig *qhl_config_parse(const char *json, const char *base_dir);

// # Safety
// `config` must come from [`qhl_config_parse`] and not have been freed.
void qhl_config_free(struct QhlRunConfig *config);

// Execute a learning run; returns NULL on failure.
//
// # Safety
// `config` must come from [`qhl_config_parse`] and not have been freed.
struct QhlTrace *qhl_run_execute(const struct QhlRunConfig *config);

// # Safety
// `trace` must come from [`qhl_run_execute`] and not have been freed.
void qhl_trace_free(struct QhlTrace *trace);

// Number of recorded experiments (0 for a NULL trace).
//
// # Safety
// `trace` must be NULL or a live handle from [`qhl_run_execute`].
size_t qhl_trace_len(const struct QhlTrace *trace);

// Parameter-vector dimension of the estimate.
//
// # Safety
// `trace` must be NULL or a live handle from [`qhl_run_execute`].
size_t qhl_trace_param_dim(const struct QhlTrace *trace);

// 1 when the run stopped early on an unrecoverable datum.
//
// # Safety
// `trace` must be NULL or a live handle from [`qhl_run_execute`].
int32_t qhl_trace_aborted(const struct QhlTrace *trace);

// Quadratic loss after experiment `index` (0-based).
//
// # Safety
// `trace` must be a live handle; `out` must point to writable memory.
enum QhlStatus qhl_trace_loss(const struct QhlTrace *trace, size_t index, double *out);

// Cumulative log marginal likelihood after experiment `index` (0-based).
//
// # Safety
// `trace` must be a live handle; `out` must point to writable memory.
enum QhlStatus qhl_trace_log_evidence(const struct QhlTrace *trace, size_t index, double *out);

// Copy the final posterior-mean estimate into `buf` (length
// [`qhl_trace_param_dim`]).
//
// # Safety
// `trace` must be a live handle; `buf` must point to at least `len`
// writable doubles.
enum QhlStatus qhl_trace_final_estimate(const struct QhlTrace *trace, double *buf, size_t len);

// Copy the data-generating parameters into `buf`.
//
// # Safety
// `trace` must be a live handle; `buf` must point to at least `len`
// writable doubles.
enum QhlStatus qhl_trace_true_params(const struct QhlTrace *trace, double *buf, size_t len);

// Serialize the full trace as JSON; free with [`qhl_string_free`].
// Returns NULL on failure.
//
// # Safety
// `trace` must be NULL or a live handle from [`qhl_run_execute`].
char *qhl_trace_to_json(const struct QhlTrace *trace);

// # Safety
// `s` must be NULL or an owned string returned by this library, freed at
// most once.
void qhl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHL_H */
