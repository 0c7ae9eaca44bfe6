#ifndef SBS_MONITOR_H
#define SBS_MONITOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SbsStatus {
  SBS_STATUS_OK = 0,
  SBS_STATUS_NULL_POINTER = 1,
  SBS_STATUS_INVALID_ARGUMENT = 2,
  SBS_STATUS_NUMERICAL = 3,
  SBS_STATUS_CONFIG = 4,
  SBS_STATUS_IO = 5,
  SBS_STATUS_PANIC = 6,
} SbsStatus;

/**
 * Run configuration.
 */
typedef struct SbsConfig SbsConfig;

/**
 * Ordered set of environment spins.
 */
typedef struct SbsSpinSet SbsSpinSet;

typedef struct SbsTimeScales {
  double t_b;
  double t_d;
  double ratio_sq;
} SbsTimeScales;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sbs_version(void);

/**
 * Length in bytes of the last error message on this thread, without the NUL.
 */
size_t sbs_last_error_length(void);

/**
 * Copies the last error message into `buf` (truncated, always NUL-terminated).
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum SbsStatus sbs_last_error_message(char *buf, size_t len);

struct SbsSpinSet *sbs_spin_set_new(void);

/**
 * # Safety
 * `set` must come from [`sbs_spin_set_new`] and not be used afterwards.
 */
void sbs_spin_set_free(struct SbsSpinSet *set);

/**
 * Appends a spin with Euler angles, larger eigenvalue `lambda` and coupling `g`.
 *
 * # Safety
 * `set` must be a live handle.
 */
enum SbsStatus sbs_spin_set_push(struct SbsSpinSet *set,
                                 double alpha,
                                 double beta,
                                 double gamma,
                                 double lambda,
                                 double g);

/**
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum SbsStatus sbs_spin_set_len(const struct SbsSpinSet *set, size_t *out);

/**
 * Collective decoherence factor of the set at time `t`.
 *
 * # Safety
 * `set` must be a live handle; `re` and `im` writable.
 */
enum SbsStatus sbs_decoherence_factor(const struct SbsSpinSet *set,
                                      double t,
                                      double *re,
                                      double *im);

/**
 * Fidelity between the two branch states of the set at time `t`.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum SbsStatus sbs_macrofraction_fidelity(const struct SbsSpinSet *set, double t, double *out);

/**
 * Orthogonalization and decoherence times for `n_total` spins,
 * macrofraction size `n_m`, observed fraction `f` and mean squared coupling.
 *
 * # Safety
 * `out` must be writable.
 */
enum SbsStatus sbs_time_scales(size_t n_total,
                               size_t n_m,
                               double f,
                               double g2bar,
                               struct SbsTimeScales *out);

/**
 * Probability that a strict majority of `n` independent trials succeeds.
 *
 * # Safety
 * `out` must be writable.
 */
enum SbsStatus sbs_majority_success(uint64_t n, double p, double *out);

/**
 * Default configuration; `*out` receives a new handle.
 *
 * # Safety
 * `out` must be writable.
 */
enum SbsStatus sbs_config_default(struct SbsConfig **out);

/**
 * Parses and validates a TOML configuration.
 *
 * # Safety
 * `toml` must be NUL-terminated and `out` writable.
 */
enum SbsStatus sbs_config_from_toml(const char *toml, struct SbsConfig **out);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum SbsStatus sbs_config_set_seed(struct SbsConfig *config, uint64_t seed);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum SbsStatus sbs_config_set_samples(struct SbsConfig *config, size_t samples);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void sbs_config_free(struct SbsConfig *config);

/**
 * Runs a scenario (`fig1`, `fig2`, `timescales`, `discrimination` or
 * `verify`) into `out_dir`. `SBS_STATUS_OK` means the run completed; its
 * process-style exit code (0, 2 or 3) lands in `*exit_code`.
 *
 * # Safety
 * `config` must be a live handle, the strings NUL-terminated and
 * `exit_code` writable.
 */
enum SbsStatus sbs_run_scenario(const struct SbsConfig *config,
                                const char *scenario,
                                const char *out_dir,
                                int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBS_MONITOR_H */
