/* C interface to the bayes-modes sampling and estimation library. */

#ifndef BAYESMODES_H
#define BAYESMODES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point. On anything other
 * than `Ok`, `bm_last_error()` carries a message.
 */
typedef enum BmStatus {
  /**
   * The call succeeded.
   */
  BM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BM_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument failed validation: bad UTF-8, non-finite value, or a
   * value outside the function's domain.
   */
  BM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The configuration file failed to load or validate.
   */
  BM_STATUS_CONFIG = 3,
  /**
   * The run failed after validation: model evaluation, data resolution,
   * or artifact I/O.
   */
  BM_STATUS_RUNTIME = 4,
  /**
   * The requested result does not exist yet (e.g. report before run).
   */
  BM_STATUS_NO_REPORT = 5,
  /**
   * A panic was caught at the boundary. Memory is intact but the handle
   * involved should be freed, not reused.
   */
  BM_STATUS_PANIC = 6,
} BmStatus;

/**
 * Opaque experiment handle: a validated configuration plus the report of
 * its most recent run.
 */
typedef struct BmExperiment BmExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message from the most recent failing call on this thread, or null if no
 * call has failed yet.
 *
 * The pointer stays valid until the next failing call on the same thread;
 * copy the string out if it must outlive that.
 */
const char *bm_last_error(void);

/**
 * Bessel function of the first kind, integer order.
 *
 * # Safety
 * `out` must be null or point to a writable f64; null is reported as
 * `BM_STATUS_NULL_ARGUMENT`.
 */
enum BmStatus bm_bessel_j(uint32_t order, double x, double *out);

/**
 * Bessel function of the second kind, order zero. Errors for x ≤ 0.
 *
 * # Safety
 * `out` must be null or point to a writable f64.
 */
enum BmStatus bm_bessel_y0(double x, double *out);

/**
 * Outgoing Hankel function of order zero, H₀⁽¹⁾(x) = J₀(x) + i·Y₀(x).
 *
 * # Safety
 * `out_re` and `out_im` must be null or point to writable f64s.
 */
enum BmStatus bm_hankel1_0(double x, double *out_re, double *out_im);

/**
 * Boundary eigenvalue closest to `target` for a unit disk with wavenumber
 * `wavenumber` and index of refraction `refraction`; ties go to the
 * smaller eigenvalue. `out_order` may be null if the angular order is not
 * wanted.
 *
 * # Safety
 * `out_value` must be null or point to a writable f64; `out_order` must be
 * null or point to a writable u32.
 */
enum BmStatus bm_stekloff_closest(double wavenumber,
                                  double target,
                                  double refraction,
                                  double *out_value,
                                  uint32_t *out_order);

/**
 * Field of a point source at (`source_x`, `source_y`) observed by a
 * receiver at (`receiver_x`, `receiver_y`): (i/4)·H₀⁽¹⁾(k·distance).
 *
 * # Safety
 * `out_re` and `out_im` must be null or point to writable f64s.
 */
enum BmStatus bm_point_source_field(double receiver_x,
                                    double receiver_y,
                                    double wavenumber,
                                    double source_x,
                                    double source_y,
                                    double *out_re,
                                    double *out_im);

/**
 * Load and validate a configuration file. On success `*out` owns a new
 * handle that must be released with `bm_experiment_free`.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be null or
 * point to a writable pointer slot.
 */
enum BmStatus bm_experiment_load(const char *path, struct BmExperiment **out);

/**
 * Override the sampler seed for subsequent runs.
 *
 * # Safety
 * `exp` must be null or a live handle from `bm_experiment_load`.
 */
enum BmStatus bm_experiment_set_seed(struct BmExperiment *exp, uint64_t seed);

/**
 * Override the artifact directory for subsequent runs.
 *
 * # Safety
 * `exp` must be null or a live handle; `dir` must be null or a
 * NUL-terminated string.
 */
enum BmStatus bm_experiment_set_output_dir(struct BmExperiment *exp, const char *dir);

/**
 * Run the experiment: sample the chain, estimate, and write `chain.csv`,
 * `histogram.csv`, and `report.json` into the configured output directory
 * (default `out`). On success the report is retained on the handle for
 * `bm_experiment_report_json`.
 *
 * # Safety
 * `exp` must be null or a live handle.
 */
enum BmStatus bm_experiment_run(struct BmExperiment *exp);

/**
 * JSON report of the handle's most recent run, or null if it has not run
 * yet (status `BM_STATUS_NO_REPORT` via `bm_last_error`).
 *
 * The pointer is owned by the handle and stays valid until the next
 * `bm_experiment_run` on it or `bm_experiment_free`.
 *
 * # Safety
 * `exp` must be null or a live handle.
 */
const char *bm_experiment_report_json(const struct BmExperiment *exp);

/**
 * Release a handle. Null is a no-op.
 *
 * # Safety
 * `exp` must be null or a handle from `bm_experiment_load` that has not
 * been freed before; any report pointer taken from it is invalid after
 * this call.
 */
void bm_experiment_free(struct BmExperiment *exp);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAYESMODES_H */
