#ifndef RENDEZVOUS_H
#define RENDEZVOUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdvStatus {
  RDV_STATUS_OK = 0,
  RDV_STATUS_NULL_ARGUMENT = 1,
  RDV_STATUS_INVALID_UTF8 = 2,
  RDV_STATUS_PARSE_ERROR = 3,
  RDV_STATUS_INVALID_SCENARIO = 4,
  RDV_STATUS_PROTOCOL_VIOLATION = 5,
  RDV_STATUS_PANIC = 6,
} RdvStatus;

/**
 * The report and trace of one finished run.
 */
typedef struct RdvRun RdvRun;

/**
 * A validated scenario.
 */
typedef struct RdvScenario RdvScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a scenario from NUL-terminated UTF-8 JSON.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a writable
 * pointer. On success `*out` receives a handle for [`rdv_scenario_free`].
 */
enum RdvStatus rdv_scenario_from_json(const char *json, struct RdvScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from [`rdv_scenario_from_json`]
 * that has not been freed.
 */
void rdv_scenario_free(struct RdvScenario *scenario);

/**
 * Simulates the scenario to completion.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a writable pointer. On
 * success `*out` receives a handle for [`rdv_run_free`].
 */
enum RdvStatus rdv_run(const struct RdvScenario *scenario, struct RdvRun **out);

/**
 * 1 if the agents met, 0 if not, -1 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
int32_t rdv_run_met(const struct RdvRun *run);

/**
 * Meeting report as pretty JSON; free with [`rdv_string_free`]. Null on
 * a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
char *rdv_run_report_json(const struct RdvRun *run);

/**
 * Event trace, one JSON object per line; free with [`rdv_string_free`].
 *
 * # Safety
 * `run` must be null or a live handle.
 */
char *rdv_run_trace_jsonl(const struct RdvRun *run);

/**
 * # Safety
 * `run` must be null or a handle from [`rdv_run`] that has not been freed.
 */
void rdv_run_free(struct RdvRun *run);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void rdv_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *rdv_last_error_message(void);

const char *rdv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RENDEZVOUS_H */
