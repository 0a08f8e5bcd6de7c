/* C interface for the kposc oscillator library. */

#ifndef KPOSC_H
#define KPOSC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KposcRegime {
  KPOSC_REGIME_UNDAMPED = 0,
  KPOSC_REGIME_WEAK = 1,
  KPOSC_REGIME_STRONG = 2,
} KposcRegime;

typedef enum KposcStabilityClass {
  KPOSC_STABILITY_CLASS_ELLIPTIC = 0,
  KPOSC_STABILITY_CLASS_HYPERBOLIC = 1,
  KPOSC_STABILITY_CLASS_PARABOLIC = 2,
} KposcStabilityClass;

typedef enum KposcStatus {
  KPOSC_STATUS_OK = 0,
  KPOSC_STATUS_NULL_POINTER = 1,
  KPOSC_STATUS_INVALID_ARGUMENT = 2,
  KPOSC_STATUS_CRITICAL_DAMPING = 3,
  KPOSC_STATUS_DEGENERATE_BASIS = 4,
  KPOSC_STATUS_OUT_OF_RANGE = 5,
  KPOSC_STATUS_WRONG_REGIME = 6,
  KPOSC_STATUS_NON_FINITE = 7,
  KPOSC_STATUS_PARSE_ERROR = 8,
  KPOSC_STATUS_IO_ERROR = 9,
} KposcStatus;

/**
 * Opaque oscillator configuration handle.
 */
typedef struct KposcConfig KposcConfig;

/**
 * Opaque trajectory evaluator handle, built from a config.
 */
typedef struct KposcMode KposcMode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a config handle in natural units (hbar = mass = 1). On success the
 * new handle is written through `out`; on failure nothing is written.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum KposcStatus kposc_config_new(double omega0,
                                  double gamma,
                                  double kappa,
                                  double tau,
                                  uint32_t n_kicks,
                                  struct KposcConfig **out);

/**
 * Override hbar and mass on an existing config.
 *
 * # Safety
 * `config` must be a live handle from `kposc_config_new`.
 */
enum KposcStatus kposc_config_set_units(struct KposcConfig *config, double hbar, double mass);

/**
 * Destroy a config handle. Null is a no-op.
 *
 * # Safety
 * `config` must be null or a handle from `kposc_config_new` that has not
 * been freed already.
 */
void kposc_config_free(struct KposcConfig *config);

/**
 * Half-trace of the one-period matrix for this config.
 *
 * # Safety
 * `config` must be a live handle; `out_re` and `out_im` must be writable.
 */
enum KposcStatus kposc_config_chi_half(const struct KposcConfig *config,
                                       double *out_re,
                                       double *out_im);

/**
 * Damping regime of the config.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
enum KposcStatus kposc_config_regime(const struct KposcConfig *config, enum KposcRegime *out);

/**
 * Classify a half-trace value by the bounded-growth criterion.
 *
 * # Safety
 * `out` must be writable.
 */
enum KposcStatus kposc_stability_class(double chi_half_re,
                                       double chi_half_im,
                                       enum KposcStabilityClass *out);

/**
 * Build a trajectory evaluator; propagates all kick coefficients up front.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable. The mode handle
 * is independent of the config afterwards.
 */
enum KposcStatus kposc_mode_new(const struct KposcConfig *config, struct KposcMode **out);

/**
 * Destroy a mode handle. Null is a no-op.
 *
 * # Safety
 * `mode` must be null or a handle from `kposc_mode_new` not freed already.
 */
void kposc_mode_free(struct KposcMode *mode);

/**
 * Mode function value at time t.
 *
 * # Safety
 * `mode` must be a live handle; `out_re` and `out_im` must be writable.
 */
enum KposcStatus kposc_mode_epsilon(const struct KposcMode *mode,
                                    double t,
                                    double *out_re,
                                    double *out_im);

/**
 * Squeezing coefficient K(t) = |eps(t)|^2.
 *
 * # Safety
 * `mode` must be a live handle; `out` must be writable.
 */
enum KposcStatus kposc_mode_squeeze(const struct KposcMode *mode, double t, double *out);

/**
 * Coordinate variance at time t in the config's units.
 *
 * # Safety
 * `mode` must be a live handle; `out` must be writable.
 */
enum KposcStatus kposc_mode_variance(const struct KposcMode *mode, double t, double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kposc_version(void);

/**
 * Static description of a status code.
 */
const char *kposc_status_message(enum KposcStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KPOSC_H */
