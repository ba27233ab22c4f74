/* Generated by cbindgen from crates/ffi. Do not edit. */

#ifndef FLOWINFER_H
#define FLOWINFER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the non-zero values other than `1` and `5` match the
// command-line exit statuses.
typedef enum FiStatus {
  FI_STATUS_OK = 0,
  // A null pointer, bad UTF-8 or an out-of-range index.
  FI_STATUS_INVALID_ARGUMENT = 1,
  FI_STATUS_CONFIG = 2,
  FI_STATUS_NUMERIC = 3,
  FI_STATUS_BUDGET = 4,
  // A Rust panic was caught at the boundary.
  FI_STATUS_INTERNAL = 5,
} FiStatus;

typedef struct FiObservations FiObservations;

typedef struct FiPotential FiPotential;

typedef struct FiRunConfig FiRunConfig;

typedef struct FiScalar FiScalar;

typedef struct FiTrajectory FiTrajectory;

typedef struct FiVelocity FiVelocity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. The pointer
// stays valid until the next `fi_*` call on this thread.
const char *fi_last_error_message(void);

// Velocity from parameter-space coordinates. `space` is `shear`,
// `cellular`, `laminar` or `full` (with `k_param`).
//
// # Safety
// `space` must be a NUL-terminated string, `theta` must point to `len`
// doubles, and `out` must be writable.
enum FiStatus fi_velocity_from_params(const char *space,
                                      uintptr_t k_param,
                                      const double *theta,
                                      uintptr_t len,
                                      struct FiVelocity **out);

// Velocity from the field CSV format.
//
// # Safety
// `csv` must be a NUL-terminated string and `out` writable.
enum FiStatus fi_velocity_from_csv(const char *csv, struct FiVelocity **out);

// `u(x)` at one point.
//
// # Safety
// `v` must be a live handle; `u1`, `u2` writable.
enum FiStatus fi_velocity_at(const struct FiVelocity *v,
                             double x1,
                             double x2,
                             double *u1,
                             double *u2);

// # Safety
// `v` must be null or a handle not yet freed.
void fi_velocity_free(struct FiVelocity *v);

// `amplitude · sin(2π (k1 x1 + k2 x2))` truncated at `k_max`.
//
// # Safety
// `out` must be writable.
enum FiStatus fi_scalar_sine(uintptr_t k_max,
                             int32_t k1,
                             int32_t k2,
                             double amplitude,
                             struct FiScalar **out);

// Scalar field from the field CSV format.
//
// # Safety
// `csv` must be a NUL-terminated string and `out` writable.
enum FiStatus fi_scalar_from_csv(const char *csv, struct FiScalar **out);

// # Safety
// `s` must be a live handle and `value` writable.
enum FiStatus fi_scalar_evaluate(const struct FiScalar *s, double x1, double x2, double *value);

// # Safety
// `s` must be null or a handle not yet freed.
void fi_scalar_free(struct FiScalar *s);

// Solves from `theta0` to `t_final` with default step and grid settings,
// keeping checkpoints every `t_final / 64`.
//
// # Safety
// `v` and `theta0` must be live handles and `out` writable.
enum FiStatus fi_solve(const struct FiVelocity *v,
                       const struct FiScalar *theta0,
                       double kappa,
                       double t_final,
                       struct FiTrajectory **out);

// Number of stored snapshots.
//
// # Safety
// `traj` must be a live handle.
uintptr_t fi_trajectory_len(const struct FiTrajectory *traj);

// Time and value at `(x1, x2)` of snapshot `index`.
//
// # Safety
// `traj` must be a live handle; `t` and `value` writable.
enum FiStatus fi_trajectory_sample(const struct FiTrajectory *traj,
                                   uintptr_t index,
                                   double x1,
                                   double x2,
                                   double *t,
                                   double *value);

// Largest `|‖θ(t)‖² + 2κ∫‖∇θ‖² − ‖θ0‖²|` over the snapshots.
//
// # Safety
// `traj` must be a live handle and `residual` writable.
enum FiStatus fi_trajectory_energy_residual(const struct FiTrajectory *traj, double *residual);

// # Safety
// `traj` must be null or a handle not yet freed.
void fi_trajectory_free(struct FiTrajectory *traj);

// Parses and validates a TOML run configuration.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` writable.
enum FiStatus fi_run_config_from_toml(const char *toml, struct FiRunConfig **out);

// # Safety
// `config` must be null or a handle not yet freed.
void fi_run_config_free(struct FiRunConfig *config);

// Samples the configured design and synthesizes data at `v_star`.
//
// # Safety
// `config` must be a live handle and `out` writable.
enum FiStatus fi_observations_synthesize(const struct FiRunConfig *config,
                                         struct FiObservations **out);

// # Safety
// `obs` must be a live handle.
uintptr_t fi_observations_len(const struct FiObservations *obs);

// Fields of datum `index`; `ic` is 0-based.
//
// # Safety
// `obs` must be a live handle; all outputs writable.
enum FiStatus fi_observations_get(const struct FiObservations *obs,
                                  uintptr_t index,
                                  double *t,
                                  double *x1,
                                  double *x2,
                                  uintptr_t *ic,
                                  double *y);

// # Safety
// `obs` must be null or a handle not yet freed.
void fi_observations_free(struct FiObservations *obs);

// The data misfit `Φ` for `obs` under the configured model and
// parameter space. `obs` is copied.
//
// # Safety
// `config` and `obs` must be live handles and `out` writable.
enum FiStatus fi_potential_new(const struct FiRunConfig *config,
                               const struct FiObservations *obs,
                               struct FiPotential **out);

// `Φ(θ)` for parameter coordinates `theta`.
//
// # Safety
// `pot` must be a live handle, `theta` must point to `len` doubles and
// `phi` must be writable.
enum FiStatus fi_potential_phi(const struct FiPotential *pot,
                               const double *theta,
                               uintptr_t len,
                               double *phi);

// # Safety
// `pot` must be null or a handle not yet freed.
void fi_potential_free(struct FiPotential *pot);

// Runs the configured consistency experiment and writes `record.json`
// plus its CSV tables into `out_dir`.
//
// # Safety
// `config` must be a live handle and `out_dir` a NUL-terminated string.
enum FiStatus fi_consistency_run(const struct FiRunConfig *config, const char *out_dir);

// Library version as a static string.
const char *fi_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWINFER_H */
