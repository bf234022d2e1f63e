/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef QOSC_H
#define QOSC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QoscStatus {
  QOSC_STATUS_OK = 0,
  QOSC_STATUS_NULL_POINTER = 1,
  QOSC_STATUS_INVALID_PARAMETER = 2,
  QOSC_STATUS_WRONG_REGIME = 3,
  QOSC_STATUS_OUT_OF_DOMAIN = 4,
  QOSC_STATUS_POLE = 5,
  QOSC_STATUS_NON_CONVERGENCE = 6,
  QOSC_STATUS_TRUNCATION = 7,
  QOSC_STATUS_QUADRATURE = 8,
  QOSC_STATUS_OUT_OF_SUPPORT = 9,
  QOSC_STATUS_DIVERGENT = 10,
  /*
   The run finished but at least one asserted check failed.
   */
  QOSC_STATUS_VERIFICATION_FAILED = 11,
  QOSC_STATUS_BUFFER_TOO_SMALL = 12,
  QOSC_STATUS_PANIC = 13,
} QoscStatus;

/*
 Opaque dense complex matrix, row-major.
 */
typedef struct QoscMatrix QoscMatrix;

/*
 Opaque (q, l², λ).
 */
typedef struct QoscParams QoscParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failing call on this thread; empty after a success.
 Valid until the next call on the same thread.
 */
const char *qosc_last_error(void);

/*
 Validates and stores (q, l², λ); q must be positive and not 1.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum QoscStatus qosc_params_new(double q, double lsq, double lambda, struct QoscParams **out);

/*
 # Safety
 `p` must be null or a handle from `qosc_params_new` not yet freed.
 */
void qosc_params_free(struct QoscParams *p);

/*
 Structure function φ(n) = a†a on |n>.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum QoscStatus qosc_phi(const struct QoscParams *p, size_t n, double *out);

/*
 Coherent-state overlap <z1|z2>.

 # Safety
 `p` must be a live handle; `out_re` and `out_im` writable.
 */
enum QoscStatus qosc_overlap(const struct QoscParams *p,
                             double z1_re,
                             double z1_im,
                             double z2_re,
                             double z2_im,
                             double *out_re,
                             double *out_im);

/*
 Deformed Hermite values h_0(x) … h_nmax(x) into `values[0..=nmax]`.
 `family` is one of "pos-sub", "mom-sub", "pos-super", "mom-super".

 # Safety
 `family` must be a NUL-terminated string; `values` must hold `len` doubles.
 */
enum QoscStatus qosc_hermite_eval(const struct QoscParams *p,
                                  const char *family,
                                  double x,
                                  size_t nmax,
                                  double *values,
                                  size_t len);

/*
 Matrix of a word in `a` and `a+` (e.g. "a+ a a") on the first `dim` levels.

 # Safety
 `word` must be a NUL-terminated string; `out` writable.
 */
enum QoscStatus qosc_word_matrix(const struct QoscParams *p,
                                 const char *word,
                                 size_t dim,
                                 struct QoscMatrix **out);

/*
 Anti-Wick quantization of z^mu conj(z)^nu on the first `dim` levels.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum QoscStatus qosc_quantize_monomial(const struct QoscParams *p,
                                       size_t mu,
                                       size_t nu,
                                       size_t dim,
                                       struct QoscMatrix **out);

/*
 # Safety
 `m` must be a live matrix handle; `rows` and `cols` writable.
 */
enum QoscStatus qosc_matrix_shape(const struct QoscMatrix *m, size_t *rows, size_t *cols);

/*
 # Safety
 `m` must be a live matrix handle; `re` and `im` writable.
 */
enum QoscStatus qosc_matrix_get(const struct QoscMatrix *m,
                                size_t row,
                                size_t col,
                                double *re,
                                double *im);

/*
 # Safety
 `m` must be null or a matrix handle not yet freed.
 */
void qosc_matrix_free(struct QoscMatrix *m);

/*
 Runs the invariant suite at `p` (or on the default grid if `p` is null) and
 returns the JSON report through `report` (free with `qosc_string_free`).
 Returns `VerificationFailed` when an asserted check fails; the report is
 written in that case too.

 # Safety
 `p` must be null or a live handle; `report` must be writable.
 */
enum QoscStatus qosc_verify(const struct QoscParams *p, size_t dim, char **report);

/*
 Hopf-structure checks at `dim` (2..=32) with antipode constant `c13`, as JSON.

 # Safety
 `p` must be a live handle; `report` must be writable.
 */
enum QoscStatus qosc_hopf_verify(const struct QoscParams *p, size_t dim, double c13, char **report);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void qosc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QOSC_H */
