#ifndef POM_H
#define POM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PomStatus {
  POM_STATUS_OK = 0,
  POM_STATUS_NULL_ARGUMENT = 1,
  POM_STATUS_INVALID_UTF8 = 2,
  POM_STATUS_INVALID_INPUT = 3,
  POM_STATUS_BACKEND = 4,
  POM_STATUS_MISMATCH = 5,
  POM_STATUS_IO = 6,
  POM_STATUS_INTERNAL = 7,
} PomStatus;

/**
 * One finished (or aborted) game and its log.
 */
typedef struct PomRun PomRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *pom_last_error(void);

/**
 * Library version as a static string.
 */
const char *pom_version(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pom_string_free(char *s);

/**
 * Play one game of a built-in experiment. `backend` is "scripted", "mock"
 * or "llm" (the latter reads POM_API_KEY, POM_MODEL, POM_ENDPOINT).
 * `log_path` may be null; otherwise the log is written there as it grows.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum PomStatus pom_run_preset(const char *preset_name,
                              const char *backend,
                              uint64_t seed,
                              const char *log_path,
                              struct PomRun **out);

/**
 * Load a log from disk.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum PomStatus pom_run_load(const char *path, struct PomRun **out);

/**
 * Release a run. Null is ignored.
 *
 * # Safety
 * `run` must come from this library and not have been freed.
 */
void pom_run_free(struct PomRun *run);

/**
 * Whether the game reached its end without an error.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_complete(const struct PomRun *run, bool *out);

/**
 * Whether the Port survived. Fails for unfinished games.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_survived(const struct PomRun *run, bool *out);

/**
 * Health when the game stopped.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_final_health(const struct PomRun *run, int64_t *out);

/**
 * Number of phase entries in the log.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_entry_count(const struct PomRun *run, size_t *out);

/**
 * Final link of the digest chain, hex encoded. Free with `pom_string_free`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_head(const struct PomRun *run, char **out);

/**
 * The whole log as JSON Lines. Free with `pom_string_free`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_jsonl(const struct PomRun *run, char **out);

/**
 * Game metrics recomputed from the log, as JSON. Free with `pom_string_free`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum PomStatus pom_run_metrics_json(const struct PomRun *run, char **out);

/**
 * Re-execute the log and compare every chain link. `POM_STATUS_MISMATCH`
 * when the log was altered or does not reproduce.
 *
 * # Safety
 * `run` must be a live handle.
 */
enum PomStatus pom_run_replay(const struct PomRun *run);

/**
 * Gini coefficient of `len` non-negative values.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum PomStatus pom_gini(const double *values, size_t len, double *out);

/**
 * Two-sided Welch t-test p-value.
 *
 * # Safety
 * `a` and `b` must point to `na` and `nb` readable doubles; `out` must be
 * writable.
 */
enum PomStatus pom_welch_p(const double *a, size_t na, const double *b, size_t nb, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POM_H */
