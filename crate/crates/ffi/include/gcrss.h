#ifndef GCRSS_H
#define GCRSS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GCRSS_OK 0

#define GCRSS_ERR_INVALID_INPUT 1

#define GCRSS_ERR_DEGENERATE_DIRECTION 2

#define GCRSS_ERR_DIVISIBILITY 3

#define GCRSS_ERR_CONDITIONING 4

#define GCRSS_ERR_TOO_LARGE 5

#define GCRSS_ERR_RANK_DEFICIENCY 6

#define GCRSS_ERR_NOT_APPLICABLE 7

#define GCRSS_ERR_PARSE 8

/**
 * A required pointer argument was null.
 */
#define GCRSS_ERR_NULL_POINTER 9

/**
 * An output buffer was too small; the required length was still written.
 */
#define GCRSS_ERR_BUFFER_TOO_SMALL 10

/**
 * The library panicked; this is a bug.
 */
#define GCRSS_ERR_PANIC 11

/**
 * Dense real matrix.
 */
typedef struct GcrssMatrix GcrssMatrix;

/**
 * Outcome of a greedy selection.
 */
typedef struct GcrssSelection GcrssSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *gcrss_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gcrss_version(void);

/**
 * Builds a `rows x cols` matrix from `rows * cols` row-major entries.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles (or may be null when
 * that product is zero) and `out` must be writable.
 */
int32_t gcrss_matrix_new(size_t rows, size_t cols, const double *data, struct GcrssMatrix **out);

/**
 * Releases a matrix. Null is ignored.
 *
 * # Safety
 * `m` must come from `gcrss_matrix_new` and not be used afterwards.
 */
void gcrss_matrix_free(struct GcrssMatrix *m);

/**
 * Shape of a matrix.
 *
 * # Safety
 * `m` must be a live handle; `rows` and `cols` must be writable.
 */
int32_t gcrss_matrix_shape(const struct GcrssMatrix *m, size_t *rows, size_t *cols);

/**
 * Greedy selection of `k` columns of `b` and `r` rows of `c`. Pass a null
 * `c` with `r = 0` for column-only selection. `eta` is the root accuracy;
 * pass 0 for the default.
 *
 * # Safety
 * Non-null handles must be live; `out` must be writable.
 */
int32_t gcrss_select(const struct GcrssMatrix *a,
                     const struct GcrssMatrix *b,
                     const struct GcrssMatrix *c,
                     size_t k,
                     size_t r,
                     double eta,
                     struct GcrssSelection **out);

/**
 * Releases a selection result. Null is ignored.
 *
 * # Safety
 * `s` must come from `gcrss_select` and not be used afterwards.
 */
void gcrss_selection_free(struct GcrssSelection *s);

/**
 * Selected column indices of `b`, ascending and zero-based. `len` receives
 * the count even when `cap` is too small.
 *
 * # Safety
 * `s` must be live; `buf` must hold `cap` elements; `len` must be writable.
 */
int32_t gcrss_selection_columns(const struct GcrssSelection *s,
                                size_t *buf,
                                size_t cap,
                                size_t *len);

/**
 * Selected row indices of `c`, ascending and zero-based.
 *
 * # Safety
 * As for `gcrss_selection_columns`.
 */
int32_t gcrss_selection_rows(const struct GcrssSelection *s, size_t *buf, size_t cap, size_t *len);

/**
 * Squared spectral norm of the residual and the root bound it satisfies.
 *
 * # Safety
 * `s` must be live; the out-pointers must be writable.
 */
int32_t gcrss_selection_residual(const struct GcrssSelection *s,
                                 double *spectral_sq,
                                 double *maxroot_bound);

/**
 * Coefficients (ascending) of the expected characteristic polynomial for
 * selecting `k` columns and `r` rows. `len` receives the coefficient count.
 *
 * # Safety
 * Handles as for `gcrss_select`; `buf` must hold `cap` doubles.
 */
int32_t gcrss_expected_poly(const struct GcrssMatrix *a,
                            const struct GcrssMatrix *b,
                            const struct GcrssMatrix *c,
                            size_t k,
                            size_t r,
                            double *buf,
                            size_t cap,
                            size_t *len);

/**
 * Largest real root, to within `eta`, of the polynomial with `len`
 * ascending coefficients.
 *
 * # Safety
 * `coeffs` must hold `len` doubles; `out` must be writable.
 */
int32_t gcrss_maxroot(const double *coeffs, size_t len, double eta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCRSS_H */
