/* Generated by cbindgen from crates/selfsim-ffi. Do not edit by hand. */

#ifndef SELFSIM_H
#define SELFSIM_H

#include <stddef.h>

typedef enum SelfsimStatus {
  SELFSIM_STATUS_OK = 0,
  SELFSIM_STATUS_NULL_POINTER = 1,
  SELFSIM_STATUS_INVALID_ARGUMENT = 2,
  SELFSIM_STATUS_DOMAIN = 3,
  SELFSIM_STATUS_NON_CONVERGENCE = 4,
  SELFSIM_STATUS_IO = 5,
  SELFSIM_STATUS_PANIC = 6,
  SELFSIM_STATUS_BUFFER_TOO_SMALL = 7,
} SelfsimStatus;

/**
 * Model configuration.
 */
typedef struct SelfsimConfig SelfsimConfig;

/**
 * Converged fixed point.
 */
typedef struct SelfsimFixedPoint SelfsimFixedPoint;

/**
 * Physical-space profile samples.
 */
typedef struct SelfsimProfile SelfsimProfile;

#ifdef __cplusplus
extern "C" {
#endif  // __cplusplus

/**
 * Short static name of a status code.
 */
const char *selfsim_status_name(SelfsimStatus status);

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *selfsim_last_error(void);

/**
 * Default configuration (eps = -1).
 */
SelfsimConfig *selfsim_config_new(void);

/**
 * # Safety
 * `cfg` must come from `selfsim_config_new` and not be used afterwards.
 */
void selfsim_config_free(SelfsimConfig *cfg);

/**
 * Sets sign, cutoff, node counts and tolerance; the result is validated.
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
SelfsimStatus selfsim_config_set(SelfsimConfig *cfg,
                                 double epsilon,
                                 double xi_max,
                                 size_t n_low,
                                 size_t n_high,
                                 double tol);

/**
 * # Safety
 * `cfg` must be a live configuration handle.
 */
SelfsimStatus selfsim_config_set_smallness(SelfsimConfig *cfg, double radius);

/**
 * Solves the fixed point for `A = a_re + i a_im`; `*out` receives a new handle.
 *
 * # Safety
 * `cfg` must be live and `out` writable.
 */
SelfsimStatus selfsim_solve(const SelfsimConfig *cfg,
                            double a_re,
                            double a_im,
                            SelfsimFixedPoint **out);

/**
 * # Safety
 * `fp` must come from `selfsim_solve` and not be used afterwards.
 */
void selfsim_fixed_point_free(SelfsimFixedPoint *fp);

/**
 * Boundary data `(c, alpha)` and the iteration count.
 *
 * # Safety
 * `fp` must be live; output pointers writable.
 */
SelfsimStatus selfsim_fixed_point_boundary(const SelfsimFixedPoint *fp,
                                           double *c,
                                           double *alpha,
                                           size_t *iterations);

/**
 * `v(xi) = S_A(xi) + z(xi)`.
 *
 * # Safety
 * `fp` must be live; output pointers writable.
 */
SelfsimStatus selfsim_fixed_point_value(const SelfsimFixedPoint *fp,
                                        double xi,
                                        double *re,
                                        double *im);

/**
 * `A` with the given `(c, alpha)`.
 *
 * # Safety
 * `cfg` must be live; output pointers writable.
 */
SelfsimStatus selfsim_invert(const SelfsimConfig *cfg,
                             double c,
                             double alpha,
                             double *a_re,
                             double *a_im);

/**
 * Airy function in the `3^{-1/3} Ai(3^{-1/3} y)` normalization and its derivative.
 *
 * # Safety
 * Output pointers writable.
 */
SelfsimStatus selfsim_airy(double y, double *ai, double *ai_prime);

/**
 * Integrates the defocusing profile from `kappa Ai` down to `y_end`.
 *
 * # Safety
 * `out` writable.
 */
SelfsimStatus selfsim_painleve(double kappa, double y_end, SelfsimProfile **out);

/**
 * # Safety
 * `p` must come from `selfsim_painleve` and not be used afterwards.
 */
void selfsim_profile_free(SelfsimProfile *p);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `p` must be live or null.
 */
size_t selfsim_profile_len(const SelfsimProfile *p);

/**
 * Copies `y`, `V`, `V'` into caller buffers of length `len`.
 *
 * # Safety
 * `p` live; each buffer valid for `len` writes.
 */
SelfsimStatus selfsim_profile_copy(const SelfsimProfile *p,
                                   double *ys,
                                   double *vs,
                                   double *dvs,
                                   size_t len);

/**
 * Envelope parameters `(rho, theta)` fitted on `[-55, -30]`.
 *
 * # Safety
 * `p` live; output pointers writable.
 */
SelfsimStatus selfsim_profile_fit(const SelfsimProfile *p, double *rho, double *theta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SELFSIM_H */
