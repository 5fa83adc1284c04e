#ifndef QPAIRINGS_H
#define QPAIRINGS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QpStatus {
  QP_STATUS_OK = 0,
  QP_STATUS_NULL_POINTER = 1,
  QP_STATUS_INVALID_ARGUMENT = 2,
  QP_STATUS_CAP_EXCEEDED = 3,
  QP_STATUS_OVERFLOW = 4,
  QP_STATUS_KERNEL_DOMAIN = 5,
  QP_STATUS_KERNEL_NOT_PSD = 6,
  QP_STATUS_INVALID_WEIGHT = 7,
  QP_STATUS_NO_SIGN_CHANGE = 8,
  QP_STATUS_PANIC = 99,
} QpStatus;

typedef enum QpClass {
  QP_CLASS_ALL = 0,
  QP_CLASS_NON_CROSSING = 1,
} QpClass;

/**
 * Table of polynomials indexed by `k = 0..len`.
 */
typedef struct QpPolyTable QpPolyTable;

/**
 * Monte Carlo configuration.
 */
typedef struct QpSimConfig QpSimConfig;

/**
 * Result of a Monte Carlo run.
 */
typedef struct QpEstimate {
  double mean;
  double std_error;
  double var_trace;
  uint64_t samples;
  /**
   * Large-N limit of the moment for the configured kernel.
   */
  double reference;
  double z_score;
} QpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *qp_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void qp_string_free(char *s);

/**
 * Number of pairings of `2k` points in `class`.
 *
 * # Safety
 * `out` must point to writable memory for one `uint64_t`.
 */
enum QpStatus qp_pairing_count(size_t k, enum QpClass class_, uint64_t *out);

/**
 * Exact pairing moment at `p = num / den`, written as a newly allocated
 * decimal fraction string such as `"3/8"`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum QpStatus qp_moment_exact(size_t k, enum QpClass class_, int64_t num, int64_t den, char **out);

/**
 * Natural log of the pairing moment at `0 < p <= 1`.
 *
 * # Safety
 * `out` must point to writable memory for one `double`.
 */
enum QpStatus qp_moment_log(size_t k, enum QpClass class_, double p, double *out);

/**
 * Pairing sum for the tabulated kernel `values[0..len]` (lag 0 first).
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` to one writable
 * double.
 */
enum QpStatus qp_weighted_sum_table(size_t k,
                                    enum QpClass class_,
                                    const double *values,
                                    size_t len,
                                    double *out);

/**
 * Table of `B_0 .. B_{k_max}`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum QpStatus qp_bk_table_new(size_t k_max, struct QpPolyTable **out);

/**
 * Table of `phi_0 .. phi_{k_max}`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum QpStatus qp_phi_table_new(size_t k_max, struct QpPolyTable **out);

/**
 * # Safety
 * `table` must be NULL or a live handle from this library.
 */
size_t qp_poly_table_len(const struct QpPolyTable *table);

/**
 * Evaluates entry `k` at `x` in floating point.
 *
 * # Safety
 * `table` must be a live handle and `out` must point to one writable double.
 */
enum QpStatus qp_poly_table_eval(const struct QpPolyTable *table, size_t k, double x, double *out);

/**
 * Entry `k` as JSON, `{"terms":[[exponent,"coefficient"],...]}`.
 *
 * # Safety
 * `table` must be a live handle and `out` must point to one writable pointer.
 */
enum QpStatus qp_poly_table_to_json(const struct QpPolyTable *table, size_t k, char **out);

/**
 * # Safety
 * `table` must be NULL or a live handle; it is invalid afterwards.
 */
void qp_poly_table_free(struct QpPolyTable *table);

/**
 * Whether `B_k(p) = p^k phi_k(p^2)` holds exactly for every `k <= k_max`.
 *
 * # Safety
 * `out` must point to one writable `bool`.
 */
enum QpStatus qp_check_bk_phi(size_t k_max, bool *out);

/**
 * Geometric-kernel configuration `V(r) = p^|r|`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum QpStatus qp_sim_config_new(size_t n,
                                size_t k,
                                double p,
                                size_t samples,
                                uint64_t seed,
                                struct QpSimConfig **out);

/**
 * Replaces the kernel by the table `values[0..len]`, lag 0 first.
 *
 * # Safety
 * `cfg` must be a live handle and `values` must point to `len` doubles.
 */
enum QpStatus qp_sim_config_set_table_kernel(struct QpSimConfig *cfg,
                                             const double *values,
                                             size_t len);

/**
 * Runs the Monte Carlo estimate of `E (1/N) Tr(A^(1) ... A^(2k))`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` must point to one `QpEstimate`.
 */
enum QpStatus qp_sim_estimate(const struct QpSimConfig *cfg, struct QpEstimate *out);

/**
 * # Safety
 * `cfg` must be NULL or a live handle; it is invalid afterwards.
 */
void qp_sim_config_free(struct QpSimConfig *cfg);

/**
 * Library version as a static string.
 */
const char *qp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPAIRINGS_H */
