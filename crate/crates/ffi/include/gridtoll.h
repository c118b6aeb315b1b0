#ifndef GRIDTOLL_H
#define GRIDTOLL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GtStatus {
  GT_STATUS_OK = 0,
  GT_STATUS_NULL_ARGUMENT = 1,
  GT_STATUS_INVALID_UTF8 = 2,
  GT_STATUS_PARSE = 3,
  GT_STATUS_INVALID_INPUT = 4,
  /**
   * The edge guard or the state budget refused the request.
   */
  GT_STATUS_LIMIT = 5,
  GT_STATUS_INTERNAL = 6,
  GT_STATUS_PANIC = 7,
} GtStatus;

/**
 * A grid with its drivers.
 */
typedef struct GtInstance GtInstance;

/**
 * A price (or infinity) on every edge of a grid.
 */
typedef struct GtPricing GtPricing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *gt_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void gt_string_free(char *s);

/**
 * Parses an instance file's contents.
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum GtStatus gt_instance_from_json(const char *json, struct GtInstance **out);

/**
 * Seeded random instance with the default budget pattern and no missing edges.
 *
 * # Safety
 * `out` is writable.
 */
enum GtStatus gt_instance_generate(size_t width,
                                   size_t length,
                                   size_t drivers,
                                   uint64_t seed,
                                   struct GtInstance **out);

/**
 * # Safety
 * `inst` is a live handle; `out` is writable. Free the result with [`gt_string_free`].
 */
enum GtStatus gt_instance_to_json(const struct GtInstance *inst, char **out);

/**
 * # Safety
 * `inst` is null or a handle not yet freed.
 */
void gt_instance_free(struct GtInstance *inst);

/**
 * Parses a pricing file for `inst`.
 *
 * # Safety
 * `inst` is a live handle, `json` a nul-terminated string, `out` writable.
 */
enum GtStatus gt_pricing_from_json(const struct GtInstance *inst,
                                   const char *json,
                                   struct GtPricing **out);

/**
 * # Safety
 * `pricing` is a live handle; `out` is writable. Free the result with [`gt_string_free`].
 */
enum GtStatus gt_pricing_to_json(const struct GtPricing *pricing, char **out);

/**
 * # Safety
 * `pricing` is null or a handle not yet freed.
 */
void gt_pricing_free(struct GtPricing *pricing);

/**
 * Revenue `pricing` earns on `inst`.
 *
 * # Safety
 * Both handles are live; `revenue` is writable.
 */
enum GtStatus gt_revenue(const struct GtInstance *inst,
                         const struct GtPricing *pricing,
                         char **revenue);

/**
 * Runs the full solver. `state_budget` of zero selects the default.
 *
 * # Safety
 * `inst` is a live handle; `out` is writable; `revenue` is null or writable.
 */
enum GtStatus gt_solve(const struct GtInstance *inst,
                       size_t state_budget,
                       bool skip_over_budget,
                       struct GtPricing **out,
                       char **revenue);

/**
 * Best uniform price on every present edge.
 *
 * # Safety
 * `inst` is a live handle; `out` is writable; `revenue` is null or writable.
 */
enum GtStatus gt_single_price(const struct GtInstance *inst,
                              struct GtPricing **out,
                              char **revenue);

/**
 * Exhaustive optimum over the rounded price set; refuses grids with more
 * than `edge_guard` present edges.
 *
 * # Safety
 * `inst` is a live handle; `out` is writable; `revenue` is null or writable.
 */
enum GtStatus gt_oracle(const struct GtInstance *inst,
                        size_t edge_guard,
                        struct GtPricing **out,
                        char **revenue);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDTOLL_H */
