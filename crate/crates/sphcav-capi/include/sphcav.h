/* C interface to the spherical-cavity scattering and energy library. */

#ifndef SPHCAV_H
#define SPHCAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every API call.
 */
typedef enum SphcavStatus {
  /**
   * Success.
   */
  SPHCAV_OK = 0,
  /**
   * A pointer argument was null.
   */
  SPHCAV_NULL_POINTER = 1,
  /**
   * An argument failed validation (range, enum value, model parameters).
   */
  SPHCAV_INVALID_ARGUMENT = 2,
  /**
   * The evaluation point is outside the mathematical domain.
   */
  SPHCAV_DOMAIN = 3,
  /**
   * A result overflowed the double range.
   */
  SPHCAV_OVERFLOW = 4,
  /**
   * The evaluation point sits on a pole of the response.
   */
  SPHCAV_POLE = 5,
  /**
   * The quadrature or contour did not converge; outputs hold the best
   * estimate.
   */
  SPHCAV_NO_CONVERGENCE = 6,
  /**
   * An internal invariant failed.
   */
  SPHCAV_INTERNAL = 7,
  /**
   * A panic was caught at the boundary.
   */
  SPHCAV_PANIC = 8,
} SphcavStatus;

/**
 * Opaque cavity handle.
 */
typedef struct sphcav_system sphcav_system;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty string after a
 * success. The pointer stays valid until the next API call on the thread.
 */
const char *sphcav_last_error_message(void);

/**
 * Cavity in an undisturbed vacuum host (null experiment: every amplitude
 * vanishes).
 */
enum SphcavStatus sphcav_system_new_vacuum(double radius, struct sphcav_system **out);

/**
 * Cavity bounded by a perfectly conducting mirror.
 */
enum SphcavStatus sphcav_system_new_perfect_mirror(double radius, struct sphcav_system **out);

/**
 * Cavity in a single-resonance Lorentzian host:
 * `eps(w) = 1 + wp^2 / (w0^2 - w^2 - i g w)`.
 */
enum SphcavStatus sphcav_system_new_lorentzian(double omega_p,
                                               double omega0,
                                               double gamma,
                                               double radius,
                                               struct sphcav_system **out);

/**
 * Cavity in a Drude-metal host: `eps(w) = 1 - wp^2 / (w^2 + i g w)`.
 */
enum SphcavStatus sphcav_system_new_drude(double omega_p,
                                          double gamma,
                                          double radius,
                                          struct sphcav_system **out);

/**
 * Place a polarizable atom (static polarizability `alpha0`, transition
 * frequency `omega0`) at the cavity center. Replaces any previous center.
 *
 * # Safety
 * `sys` must be a live handle from a constructor.
 */
enum SphcavStatus sphcav_system_set_atom(struct sphcav_system *sys, double alpha0, double omega0);

/**
 * Release a handle. Passing null is a no-op.
 *
 * # Safety
 * `sys` must be a handle from a constructor, freed at most once.
 */
void sphcav_system_free(struct sphcav_system *sys);

/**
 * Wall scattering amplitude `s_b` for channel `(l, pol)` at the complex
 * frequency `omega_re + i omega_im` (units of `omega_ref`).
 *
 * # Safety
 * `sys` must be a live handle; out-pointers must be writable or null.
 */
enum SphcavStatus sphcav_s_b(const struct sphcav_system *sys,
                             size_t l,
                             int pol,
                             double omega_re,
                             double omega_im,
                             double *out_re,
                             double *out_im);

/**
 * Center scattering amplitude `s_c` for channel `(l, pol)`; identically 1
 * when the cavity center is empty.
 *
 * # Safety
 * `sys` must be a live handle; out-pointers must be writable or null.
 */
enum SphcavStatus sphcav_s_c(const struct sphcav_system *sys,
                             size_t l,
                             int pol,
                             double omega_re,
                             double omega_im,
                             double *out_re,
                             double *out_im);

/**
 * Degeneracy-folded channel contribution to the regularized ground-state
 * energy, in `hbar omega_ref`. `rel_tol <= 0` selects the default (1e-8).
 * Returns `SPHCAV_NO_CONVERGENCE` (with outputs written) when the error
 * estimate misses the tolerance.
 *
 * # Safety
 * `sys` must be a live handle; out-pointers must be writable.
 */
enum SphcavStatus sphcav_channel_energy(const struct sphcav_system *sys,
                                        size_t l,
                                        int pol,
                                        double rel_tol,
                                        double *out_value,
                                        double *out_error);

/**
 * Energy shift of the centered atom, in `hbar omega_ref`. The handle must
 * have an atom installed via `sphcav_system_set_atom`. Returns
 * `SPHCAV_NO_CONVERGENCE` (with outputs written) when the error estimate
 * misses the tolerance.
 *
 * # Safety
 * `sys` must be a live handle; out-pointers must be writable.
 */
enum SphcavStatus sphcav_atom_shift(const struct sphcav_system *sys,
                                    double rel_tol,
                                    double *out_value,
                                    double *out_error);

/**
 * Number of cavity modes of channel `(l, pol)` inside the closed rectangle
 * `[re_min, re_max] x [im_min, im_max]` of the complex frequency plane, by
 * the argument principle.
 *
 * # Safety
 * `sys` must be a live handle; `out_count` must be writable.
 */
enum SphcavStatus sphcav_count_modes(const struct sphcav_system *sys,
                                     size_t l,
                                     int pol,
                                     double re_min,
                                     double re_max,
                                     double im_min,
                                     double im_max,
                                     int64_t *out_count);

/**
 * Integral of the scatterers' density-of-states change of channel
 * `(l, pol)` over `[omega_lo, omega_hi]`, accumulated over `n_bins` bins.
 *
 * # Safety
 * `sys` must be a live handle; `out_total` must be writable.
 */
enum SphcavStatus sphcav_dos_binned_total(const struct sphcav_system *sys,
                                          size_t l,
                                          int pol,
                                          double omega_lo,
                                          double omega_hi,
                                          size_t n_bins,
                                          double *out_total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHCAV_H */
