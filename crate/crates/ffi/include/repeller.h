/* C interface to the repeller laboratory: scale ladders, orbit
   classification, preimage solving, and dimension estimates.
   Generated from the Rust sources; do not edit by hand. */

#ifndef REPELLER_H
#define REPELLER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every API call.
 */
typedef enum RepStatus {
  /**
   * The call succeeded and every out-pointer is filled.
   */
  RepStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  RepStatus_NullArgument = 1,
  /**
   * Parameters outside their documented ranges.
   */
  RepStatus_InvalidParams = 2,
  /**
   * The computation failed numerically (overflow, lost bracket, contour
   * through a zero, ...); `repeller_last_error` has the details.
   */
  RepStatus_Numerical = 3,
  /**
   * A mathematical precondition does not hold (e.g. no contraction).
   */
  RepStatus_Domain = 4,
  /**
   * An index was outside the structure it addresses.
   */
  RepStatus_OutOfRange = 5,
  /**
   * A library invariant broke; always a bug worth reporting.
   */
  RepStatus_Internal = 6,
} RepStatus;

/**
 * Orbit classification outcome at the ABI: mirrors the library's verdict
 * codes (0 bounded witness, 1 certified escape, 2 undecided).
 */
typedef enum RepVerdict {
  RepVerdict_BoundedWitness = 0,
  RepVerdict_EscapeCertified = 1,
  RepVerdict_Undecided = 2,
} RepVerdict;

/**
 * Opaque laboratory handle: parameters plus the built scale ladder.
 */
typedef struct RepLab RepLab;

/**
 * One located preimage, in log-polar form plus its annulus index and the
 * local expansion strength.
 */
typedef struct RepPreimage {
  /**
   * log2 of the point's magnitude.
   */
  double log2_mag;
  /**
   * Argument in radians, in (-pi, pi].
   */
  double angle;
  /**
   * Index j of the annulus containing the point.
   */
  uintptr_t region;
  /**
   * log2 |f'| at the point.
   */
  double f_prime_log2;
} RepPreimage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message (UTF-8, NUL-terminated) into `buf`.
 *
 * Returns the full length of the message including the terminating NUL.
 * When `cap` is smaller, the copy is truncated but still NUL-terminated;
 * call again with the returned length to get the whole text. A zero return
 * means no error has been recorded on this thread.
 *
 * # Safety
 * `buf` must point to at least `cap` writable bytes, or be null (then only
 * the required length is returned).
 */
uintptr_t repeller_last_error(char *buf, uintptr_t cap);

/**
 * Builds a laboratory for coefficient `c` and top annulus index `n` with
 * default evaluation settings, and stores the handle in `out`.
 *
 * # Safety
 * `out` must be a valid pointer. The returned handle must be released with
 * [`repeller_lab_free`] exactly once.
 */
enum RepStatus repeller_lab_new(double c, uintptr_t n, struct RepLab **out);

/**
 * Releases a handle from [`repeller_lab_new`]. Null is a no-op.
 *
 * # Safety
 * `lab` must be a handle returned by `repeller_lab_new` that has not been
 * freed already.
 */
void repeller_lab_free(struct RepLab *lab);

/**
 * Number of ladder rungs the lab tracks (the truncation order M).
 *
 * # Safety
 * `lab` must be a live handle from `repeller_lab_new`.
 */
uintptr_t repeller_lab_height(const struct RepLab *lab);

/**
 * Writes the log2 magnitudes of the k-th rung: the zero `a_k` and the
 * annulus radii `r_k <= a_k <= s_k`. Index 0 is the origin rung, where all
 * of `a_0 = r_0 = 0` report as -infinity.
 *
 * # Safety
 * `lab` must be a live handle; the out-pointers must be valid or null
 * (null entries are skipped).
 */
enum RepStatus repeller_lab_scale(const struct RepLab *lab,
                                  uintptr_t k,
                                  double *a_log2,
                                  double *r_log2,
                                  double *s_log2);

/**
 * Evaluates `f` at the log-polar point `(2^log2_mag, angle)` and writes the
 * image in the same form, plus the relative-error bound of the evaluation.
 *
 * # Safety
 * `lab` must be a live handle; non-null out-pointers must be valid.
 */
enum RepStatus repeller_eval(const struct RepLab *lab,
                             double log2_mag,
                             double angle,
                             double *out_log2_mag,
                             double *out_angle,
                             double *out_rel_err);

/**
 * Classifies the orbit of the log-polar point, writing the verdict and the
 * number of iterations actually inspected.
 *
 * # Safety
 * `lab` must be a live handle; non-null out-pointers must be valid.
 */
enum RepStatus repeller_classify(const struct RepLab *lab,
                                 double log2_mag,
                                 double angle,
                                 uintptr_t max_iter,
                                 enum RepVerdict *out_verdict,
                                 uintptr_t *out_steps);

/**
 * Solves `f(b) = a` over the bounded annuli for the log-polar base point
 * `a`, allocating an array of [`RepPreimage`] in canonical order (annulus,
 * then angle). The array must be released with [`repeller_preimages_free`].
 *
 * # Safety
 * `lab` must be a live handle; `out` and `out_len` must be valid pointers.
 */
enum RepStatus repeller_preimages(const struct RepLab *lab,
                                  double log2_mag,
                                  double angle,
                                  struct RepPreimage **out,
                                  uintptr_t *out_len);

/**
 * Releases an array from [`repeller_preimages`]. Null is a no-op.
 *
 * # Safety
 * `ptr`/`len` must come from a single `repeller_preimages` call and must
 * not have been freed already.
 */
void repeller_preimages_free(struct RepPreimage *ptr, uintptr_t len);

/**
 * Computes the closed-form dimension ceiling t* for coefficient `c`
 * (the root of `L^{-t} = 1 - 2^{-t}` with `L = c/(4e)`), without building
 * a lab. Fails with `Domain` when `L <= 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RepStatus repeller_dimension_ceiling(double c, double *out);

/**
 * Finite-depth Bowen dimension estimate: builds the depth-`depth` preimage
 * tree over the log-polar base point and bisects the pressure to its zero
 * inside `[t_lo, t_hi]`.
 *
 * # Safety
 * `lab` must be a live handle; `out` must be a valid pointer.
 */
enum RepStatus repeller_dimension_estimate(const struct RepLab *lab,
                                           double log2_mag,
                                           double angle,
                                           uintptr_t depth,
                                           double t_lo,
                                           double t_hi,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REPELLER_H */
