#ifndef FTANGLE_H
#define FTANGLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_ARGUMENT = 2,
  FT_STATUS_NOT_NORMALIZED = 3,
  /**
   * Numerical consistency check failed (eigensolver, dual computation, identity).
   */
  FT_STATUS_NUMERICAL = 4,
  /**
   * Density matrix is singular where the operation needs it regular.
   */
  FT_STATUS_SINGULAR = 5,
  /**
   * Internal panic caught at the boundary.
   */
  FT_STATUS_PANIC = 6,
} FtStatus;

/**
 * Opaque handle to a validated `(w, z)` pair.
 */
typedef struct FtState FtState;

typedef struct FtComplex {
  double re;
  double im;
} FtComplex;

typedef struct FtInvariants {
  double x[3];
  double y[3];
  double r;
  double s;
  double eta;
  double sigma;
  double gamma_plus;
  double gamma_minus;
  struct FtComplex h;
  struct FtComplex l;
} FtInvariants;

typedef struct FtMeasures {
  double concurrence;
  double negativity;
  double purity;
  double participation;
  /**
   * Ascending.
   */
  double rho_spectrum[4];
  /**
   * Descending.
   */
  double spinflip_spectrum[4];
  /**
   * Descending.
   */
  double pt_spectrum[4];
  bool entangled;
} FtMeasures;

typedef struct FtTangles {
  double c2_1_234;
  double c2_2_134;
  double c2_12;
  double c2_13;
  double c2_24;
  double sigma1;
  double sigma2;
  double p_plus;
  double p_minus;
  /**
   * True for the entangled branch of the residual-tangle formulas.
   */
  bool entangled_branch;
  bool boundary;
  bool saturated;
} FtTangles;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a state from `w[3]` and `z[3]`. With `normalize` the pair is
 * rescaled to unit norm; otherwise it must already be normalized.
 *
 * # Safety
 * `w` and `z` must point to 3 readable `FtComplex`; `out` must be writable.
 * The returned handle is released with [`ft_state_free`].
 */
enum FtStatus ft_state_new(const struct FtComplex *w,
                           const struct FtComplex *z,
                           bool normalize,
                           struct FtState **out);

/**
 * Random state number `index` of the run seeded with `seed`; identical to
 * the states the command-line sampler draws.
 *
 * # Safety
 * `out` must be writable.
 */
enum FtStatus ft_state_random(uint64_t seed, uint64_t index, struct FtState **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `s` must come from [`ft_state_new`] or [`ft_state_random`] and not have
 * been freed.
 */
void ft_state_free(struct FtState *s);

/**
 * Copies the (normalized) vectors out of a handle.
 *
 * # Safety
 * `w_out` and `z_out` must point to 3 writable `FtComplex` each.
 */
enum FtStatus ft_state_vectors(const struct FtState *s,
                               struct FtComplex *w_out,
                               struct FtComplex *z_out);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum FtStatus ft_invariants(const struct FtState *s, struct FtInvariants *out);

/**
 * Closed-form concurrence, negativity, purity and spectra.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum FtStatus ft_measures(const struct FtState *s, struct FtMeasures *out);

/**
 * Single, pairwise and residual tangles of qubits 1 and 2.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum FtStatus ft_tangles(const struct FtState *s, struct FtTangles *out);

/**
 * The two-qubit density matrix, row-major into `out[16]`.
 *
 * # Safety
 * `s` must be a live handle; `out` must point to 16 writable `FtComplex`.
 */
enum FtStatus ft_rho(const struct FtState *s, struct FtComplex *out);

/**
 * Wootters concurrence of an arbitrary two-qubit density matrix given
 * row-major in `m[16]`.
 *
 * # Safety
 * `m` must point to 16 readable `FtComplex`; `out` must be writable.
 */
enum FtStatus ft_wootters_concurrence(const struct FtComplex *m, double *out);

/**
 * Negativity `max{0, −2μ_min}` of an arbitrary two-qubit density matrix.
 *
 * # Safety
 * `m` must point to 16 readable `FtComplex`; `out` must be writable.
 */
enum FtStatus ft_negativity(const struct FtComplex *m, double *out);

/**
 * Bounds on the negativity of an entangled state with concurrence `c`.
 *
 * # Safety
 * `lower` and `upper` must be writable.
 */
enum FtStatus ft_cn_bounds(double c, double *lower, double *upper);

/**
 * Bures line element `ds²` along the tangent `(dw[3], dz[3])`, which must
 * preserve the norm to first order.
 *
 * # Safety
 * `s` must be a live handle; `dw`, `dz` must point to 3 readable
 * `FtComplex`; `out` must be writable.
 */
enum FtStatus ft_bures(const struct FtState *s,
                       const struct FtComplex *dw,
                       const struct FtComplex *dz,
                       double *out);

/**
 * Description of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *ft_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *ft_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTANGLE_H */
