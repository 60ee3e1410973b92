#ifndef MBVERIFY_H
#define MBVERIFY_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum MbvStatus {
  MBV_STATUS_OK = 0,
  MBV_STATUS_NULL_POINTER = 1,
  MBV_STATUS_INVALID_STRING = 2,
  /**
   * Unknown identity, wrong parameter schema or violated constraint.
   */
  MBV_STATUS_INVALID_INPUT = 3,
  /**
   * Numerical failure such as a pole of Gamma at the inputs.
   */
  MBV_STATUS_NUMERICAL = 4,
  MBV_STATUS_PANIC = 5,
} MbvStatus;

/**
 * Opaque identity case.
 */
typedef struct MbvCase MbvCase;

/**
 * Opaque verification report.
 */
typedef struct MbvReport MbvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *mbv_last_error(void);

/**
 * Build a case from a JSON parameter object.
 *
 * # Safety
 * `identity_name` and `params_json` must be NUL-terminated strings; `out` must
 * be writable.
 */
enum MbvStatus mbv_case_from_json(const char *identity_name,
                                  size_t n,
                                  const char *params_json,
                                  struct MbvCase **out);

/**
 * Build a case with seeded parameters.
 *
 * # Safety
 * `identity_name` must be a NUL-terminated string; `out` must be writable.
 */
enum MbvStatus mbv_case_sample(const char *identity_name,
                               size_t n,
                               uint64_t seed,
                               struct MbvCase **out);

/**
 * Number of integration axes; 0 for a null handle.
 *
 * # Safety
 * `case` must be null or a live handle.
 */
size_t mbv_case_dim(const struct MbvCase *case_);

/**
 * Complex logarithm of the closed-form right-hand side.
 *
 * # Safety
 * `case` must be a live handle; `re` and `im` must be writable.
 */
enum MbvStatus mbv_case_rhs_log(const struct MbvCase *case_, double *re, double *im);

/**
 * # Safety
 * `case` must be null or a handle not yet freed.
 */
void mbv_case_free(struct MbvCase *case_);

/**
 * Integrate the left-hand side and compare with the right-hand side.
 *
 * `method` may be null for automatic selection, otherwise one of
 * "auto", "line", "tensor", "qmc". A non-positive `rel_tol` selects
 * 1e-8.
 *
 * # Safety
 * `case` must be a live handle, `method` null or a NUL-terminated string,
 * `out` writable.
 */
enum MbvStatus mbv_verify(const struct MbvCase *case_,
                          double rel_tol,
                          const char *method,
                          uint64_t seed,
                          struct MbvReport **out);

/**
 * Verdict as a process-style code: 0 pass, 1 fail, 2 inconclusive;
 * -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t mbv_report_status(const struct MbvReport *report);

/**
 * Relative deviation |lhs/rhs - 1|; NaN when no estimate was produced.
 *
 * # Safety
 * `report` must be a live handle, `out` writable.
 */
enum MbvStatus mbv_report_deviation(const struct MbvReport *report, double *out);

/**
 * Full report as JSON.
 *
 * # Safety
 * `report` must be a live handle, `out` writable.
 */
enum MbvStatus mbv_report_to_json(const struct MbvReport *report, char **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void mbv_report_free(struct MbvReport *report);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void mbv_string_free(char *s);

/**
 * Complex log Gamma(re + i im).
 *
 * # Safety
 * `out_re` and `out_im` must be writable.
 */
enum MbvStatus mbv_log_gamma(double re, double im, double *out_re, double *out_im);

/**
 * Identity listing (ids, dimensions, schemas, constraints) as JSON.
 *
 * # Safety
 * `out` must be writable.
 */
enum MbvStatus mbv_identity_list_json(char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBVERIFY_H */
