#ifndef QCHAOS_H
#define QCHAOS_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_ARGUMENT = 2,
  QC_STATUS_DEGENERATE_ANISOTROPY = 3,
  QC_STATUS_NODAL_SINGULARITY = 4,
  QC_STATUS_UNCONTROLLABLE_SURFACE = 5,
  QC_STATUS_INVALID_CONTROLLER = 6,
  QC_STATUS_SERIES_TOO_SHORT = 7,
  QC_STATUS_UNDEFINED_EXPONENT = 8,
  QC_STATUS_INDEX_OUT_OF_RANGE = 9,
  QC_STATUS_PANIC = 10,
  QC_STATUS_OTHER = 11,
} QcStatus;

typedef enum QcBranch {
  QC_BRANCH_PLUS = 0,
  QC_BRANCH_MINUS = 1,
} QcBranch;

typedef struct QcParams QcParams;

typedef struct QcSyncRun QcSyncRun;

typedef struct QcTrajectory QcTrajectory;

/**
 * `(x_r, x_i, y_r, y_i)`.
 */
typedef struct QcState {
  double x_r;
  double x_i;
  double y_r;
  double y_i;
} QcState;

typedef struct QcController {
  double surface[4];
  double gain[4];
  double q;
  double r;
  double epsilon;
} QcController;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t qc_last_error_message(char *buf, size_t len);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum QcStatus qc_params_new(double beta, double gamma, enum QcBranch branch, struct QcParams **out);

/**
 * # Safety
 * `p` must come from `qc_params_new` and not be used afterwards.
 */
void qc_params_free(struct QcParams *p);

/**
 * Looks up a derived coefficient by name (`"a1"`, `"b1"`, `"eta1"`, `"D"`, ...).
 *
 * # Safety
 * `p` must be a live handle, `name` a NUL-terminated string, `out` writable.
 */
enum QcStatus qc_params_get(const struct QcParams *p, const char *name, double *out);

/**
 * Velocity of the first excited state at `at`, written as a state of derivatives.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum QcStatus qc_velocity_excited(const struct QcParams *p, struct QcState at, struct QcState *out);

/**
 * Integrates eigenstate `(n1, n2)` from `initial`. A nodal singularity
 * truncates the trajectory instead of failing; see `qc_trajectory_aborted`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum QcStatus qc_integrate(const struct QcParams *p,
                           uint32_t n1,
                           uint32_t n2,
                           struct QcState initial,
                           double t_final,
                           double dt,
                           size_t stride,
                           struct QcTrajectory **out);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
size_t qc_trajectory_len(const struct QcTrajectory *t);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
double qc_trajectory_dt_sample(const struct QcTrajectory *t);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
bool qc_trajectory_aborted(const struct QcTrajectory *t);

/**
 * # Safety
 * `t` must be a live handle and `out` writable.
 */
enum QcStatus qc_trajectory_state(const struct QcTrajectory *t, size_t k, struct QcState *out);

/**
 * # Safety
 * `t` must come from `qc_integrate` and not be used afterwards.
 */
void qc_trajectory_free(struct QcTrajectory *t);

struct QcController qc_controller_default(void);

/**
 * Synchronizes `slave` to `master` under the first excited state.
 *
 * # Safety
 * `p` and `ctl` must be valid and `out` writable.
 */
enum QcStatus qc_sync(const struct QcParams *p,
                      const struct QcController *ctl,
                      struct QcState master,
                      struct QcState slave,
                      double t_final,
                      double dt,
                      size_t stride,
                      struct QcSyncRun **out);

/**
 * # Safety
 * `run` must be null or a live handle.
 */
size_t qc_sync_len(const struct QcSyncRun *run);

/**
 * Error, control input and sliding value at sample `k`. Any output pointer
 * may be null.
 *
 * # Safety
 * `run` must be a live handle; non-null outputs must hold 4 doubles
 * (`error`, `control`) or 1 double (`s`).
 */
enum QcStatus qc_sync_sample(const struct QcSyncRun *run,
                             size_t k,
                             double *error,
                             double *control,
                             double *s);

/**
 * Largest `|e_i|` over samples after `t_from`.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
double qc_sync_max_error_after(const struct QcSyncRun *run, double t_from);

/**
 * Time from which `|s| < epsilon` holds; `IndexOutOfRange` if never.
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum QcStatus qc_sync_reach_time(const struct QcSyncRun *run, double epsilon, double *out);

/**
 * # Safety
 * `run` must come from `qc_sync` and not be used afterwards.
 */
void qc_sync_free(struct QcSyncRun *run);

/**
 * Median Rosenstein exponent over delays `tau_min..=tau_max`.
 *
 * # Safety
 * `data` must hold `len` doubles and `out` be writable.
 */
enum QcStatus qc_largest_lyapunov(const double *data,
                                  size_t len,
                                  double dt_sample,
                                  size_t embed_dim,
                                  size_t tau_min,
                                  size_t tau_max,
                                  double *out);

/**
 * Spectral flatness of the Hann-windowed periodogram.
 *
 * # Safety
 * `data` must hold `len` doubles and `out` be writable.
 */
enum QcStatus qc_spectral_flatness(const double *data, size_t len, double dt_sample, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHAOS_H */
