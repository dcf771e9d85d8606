#ifndef COOPAN_H
#define COOPAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum CoopanStatus {
  COOPAN_STATUS_OK = 0,
  COOPAN_STATUS_NULL_ARGUMENT = 1,
  COOPAN_STATUS_INVALID_UTF8 = 2,
  COOPAN_STATUS_SYNTAX = 3,
  COOPAN_STATUS_INVALID_SPEC = 4,
  COOPAN_STATUS_TOO_MANY_PROPERTIES = 5,
  COOPAN_STATUS_UNKNOWN_QUERY = 6,
  COOPAN_STATUS_NOT_A_PROPERTY = 7,
  COOPAN_STATUS_NO_INITIAL = 8,
  COOPAN_STATUS_OUT_OF_RANGE = 9,
  COOPAN_STATUS_INTERNAL = 10,
} CoopanStatus;

/**
 * Analysis of one specification.
 */
typedef struct CoopanAnalysis CoopanAnalysis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and analyses `source`. `max_properties` of 0 selects the default
 * bound. On success `*out` receives a new handle.
 *
 * # Safety
 * `source` must be a nul-terminated string and `out` a valid pointer.
 */
enum CoopanStatus coopan_analysis_new(const char *source,
                                      size_t max_properties,
                                      struct CoopanAnalysis **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `analysis` must come from [`coopan_analysis_new`] and not be used again.
 */
void coopan_analysis_free(struct CoopanAnalysis *analysis);

/**
 * Number of context properties.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CoopanStatus coopan_property_count(const struct CoopanAnalysis *analysis, size_t *out);

/**
 * Number of solvers.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CoopanStatus coopan_solver_count(const struct CoopanAnalysis *analysis, size_t *out);

/**
 * Rendering of property `id`, e.g. `do(1) & ok(l)`.
 *
 * # Safety
 * Pointers must be valid; free the result with [`coopan_string_free`].
 */
enum CoopanStatus coopan_property_render(const struct CoopanAnalysis *analysis,
                                         size_t id,
                                         char **out);

/**
 * Id of the property written as `expr`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CoopanStatus coopan_property_lookup(const struct CoopanAnalysis *analysis,
                                         const char *expr,
                                         size_t *out);

/**
 * Image of property `id` under the solver at position `solver` (0-based,
 * ordered by solver index). Up to `capacity` ids are written to `ids`;
 * `*len` receives the full image size, so a call with `capacity` 0 sizes
 * the buffer.
 *
 * # Safety
 * `ids` must have room for `capacity` entries (or be null when it is 0).
 */
enum CoopanStatus coopan_image(const struct CoopanAnalysis *analysis,
                               size_t solver,
                               size_t id,
                               size_t *ids,
                               size_t capacity,
                               size_t *len);

/**
 * Feasible set as a JSON report. A null `initial` uses the
 * specification's `initial` declaration.
 *
 * # Safety
 * Pointers must be valid; free the result with [`coopan_string_free`].
 */
enum CoopanStatus coopan_reach_json(const struct CoopanAnalysis *analysis,
                                    const char *initial,
                                    char **out);

/**
 * Solutions of query `name` as a JSON report, evaluated on `jobs` threads.
 *
 * # Safety
 * Pointers must be valid; free the result with [`coopan_string_free`].
 */
enum CoopanStatus coopan_query_json(const struct CoopanAnalysis *analysis,
                                    const char *name,
                                    size_t jobs,
                                    char **out);

/**
 * The constraint system in LogiCalc syntax.
 *
 * # Safety
 * Pointers must be valid; free the result with [`coopan_string_free`].
 */
enum CoopanStatus coopan_export_logicalc(const struct CoopanAnalysis *analysis, char **out);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on this thread.
 */
const char *coopan_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void coopan_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOPAN_H */
