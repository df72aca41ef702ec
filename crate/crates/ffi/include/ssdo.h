#ifndef SSDO_H
#define SSDO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsdoForm {
  SSDO_FORM_AUTO = 0,
  SSDO_FORM_DENSE = 1,
  SSDO_FORM_PATH = 2,
} SsdoForm;

typedef enum SsdoStatus {
  SSDO_STATUS_OK = 0,
  SSDO_STATUS_NULL_POINTER = 1,
  SSDO_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or inconsistent input; same meaning as CLI exit code 3.
   */
  SSDO_STATUS_INVALID_INPUT = 3,
  /**
   * A demanded pair has no usable path; same meaning as CLI exit code 4.
   */
  SSDO_STATUS_INFEASIBLE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  SSDO_STATUS_INTERNAL = 5,
} SsdoStatus;

/**
 * Parsed and validated instance.
 */
typedef struct SsdoInstance SsdoInstance;

/**
 * Outcome of one solve.
 */
typedef struct SsdoResult SsdoResult;

/**
 * Solver settings. Start from [`ssdo_config_default`].
 */
typedef struct SsdoConfig {
  double epsilon;
  double epsilon0;
  /**
   * Wall-clock budget in seconds; zero or negative means none.
   */
  double time_budget_s;
  bool static_traversal;
  bool greedy_subproblem;
  enum SsdoForm form;
} SsdoConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library from the same thread.
 */
const char *ssdo_last_error(void);

/**
 * Library version as a static string.
 */
const char *ssdo_version(void);

struct SsdoConfig ssdo_config_default(void);

/**
 * Builds an instance from topology JSON, path-set JSON and dense demand
 * CSV, the same formats the CLI reads. On success `*out` owns a new handle.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is null or writable.
 */
enum SsdoStatus ssdo_instance_new(const char *topology_json,
                                  const char *paths_json,
                                  const char *demands_csv,
                                  struct SsdoInstance **out);

/**
 * # Safety
 * `instance` is null or came from [`ssdo_instance_new`] and is not used again.
 */
void ssdo_instance_free(struct SsdoInstance *instance);

/**
 * Solves `instance`. `config` may be null for defaults. `hot_split_json`
 * may be null for a cold start; `dual` races it against a cold start.
 *
 * # Safety
 * Pointers are null or valid for their types; `out` is null or writable.
 */
enum SsdoStatus ssdo_solve(const struct SsdoInstance *instance,
                           const struct SsdoConfig *config,
                           const char *hot_split_json,
                           bool dual,
                           struct SsdoResult **out);

/**
 * Final MLU, or NaN for a null handle.
 *
 * # Safety
 * `result` is null or a live handle from [`ssdo_solve`].
 */
double ssdo_result_mlu(const struct SsdoResult *result);

/**
 * Solve report as JSON, owned by `result`.
 *
 * # Safety
 * `result` is null or a live handle from [`ssdo_solve`].
 */
const char *ssdo_result_report_json(const struct SsdoResult *result);

/**
 * Final split ratios as JSON in the CLI split-file format, owned by `result`.
 *
 * # Safety
 * `result` is null or a live handle from [`ssdo_solve`].
 */
const char *ssdo_result_split_json(const struct SsdoResult *result);

/**
 * # Safety
 * `result` is null or came from [`ssdo_solve`] and is not used again.
 */
void ssdo_result_free(struct SsdoResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSDO_H */
