#ifndef WLAB_H
#define WLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; `WLAB_STATUS_OK` is zero.
 */
typedef enum WlabStatus {
  WLAB_STATUS_OK = 0,
  WLAB_STATUS_NULL_POINTER = 1,
  WLAB_STATUS_INVALID_UTF8 = 2,
  WLAB_STATUS_PARSE_ERROR = 3,
  WLAB_STATUS_INVALID_DATA = 4,
  WLAB_STATUS_SINGULAR_POINT = 5,
  WLAB_STATUS_MATH_ERROR = 6,
  WLAB_STATUS_CONSTANT_COMPONENT = 7,
  WLAB_STATUS_PANIC = 8,
} WlabStatus;

/**
 * Parsed Weierstrass data and the tolerances in effect.
 */
typedef struct WlabData WlabData;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an input document (`{"genus", "punctures", "h", "g1", "g2"}`).
 * Tolerances are the defaults scaled by `WLAB_TOLERANCE_SCALE`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum WlabStatus wlab_data_from_json(const char *json, struct WlabData **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `d` must come from `wlab_data_from_json` and not be used afterwards.
 */
void wlab_data_free(struct WlabData *d);

/**
 * Number of punctures.
 *
 * # Safety
 * `d` must be a live handle or null.
 */
size_t wlab_data_puncture_count(const struct WlabData *d);

/**
 * Metric factor `lambda^2` at `re + i im`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum WlabStatus wlab_metric_factor(const struct WlabData *d, double re, double im, double *out);

/**
 * Gauss curvature at `re + i im`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum WlabStatus wlab_gauss_curvature(const struct WlabData *d, double re, double im, double *out);

/**
 * Totally ramified value number of component 1 or 2 as `num / den`.
 *
 * # Safety
 * `d` must be a live handle; `num` and `den` must be writable.
 */
enum WlabStatus wlab_nu_f(const struct WlabData *d, uint32_t component, int64_t *num, int64_t *den);

/**
 * Full JSON report (schema 1). The string is owned by the caller and
 * released with `wlab_string_free`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum WlabStatus wlab_report_json(const struct WlabData *d, uint64_t seed, char **out);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void wlab_string_free(char *s);

/**
 * Message of the last failure on this thread, empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *wlab_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WLAB_H */
