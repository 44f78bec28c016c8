/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef EXITWALK_H
#define EXITWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ExwStatus {
  EXW_STATUS_OK = 0,
  EXW_STATUS_DOMAIN = 1,
  EXW_STATUS_OVERFLOW = 2,
  EXW_STATUS_BELOW_SERIES_CUTOFF = 3,
  EXW_STATUS_TRUNCATION = 4,
  EXW_STATUS_NO_CONVERGENCE = 5,
  EXW_STATUS_STEP_BUDGET = 6,
  EXW_STATUS_GRID_TOO_COARSE = 7,
  EXW_STATUS_MISSING_TABLE = 8,
  EXW_STATUS_FORMAT = 9,
  EXW_STATUS_DEGENERATE_FIT = 10,
  EXW_STATUS_CONFIG = 11,
  EXW_STATUS_IO = 12,
  EXW_STATUS_NULL_POINTER = 13,
  EXW_STATUS_PANIC = 14,
} ExwStatus;

// Generator of a precomputed exit-time table.
typedef enum ExwTableMethod {
  EXW_TABLE_METHOD_INVERSION = 0,
  EXW_TABLE_METHOD_EULER = 1,
} ExwTableMethod;

// Time accounting of the walk on spheres.
typedef enum ExwExitMode {
  EXW_EXIT_MODE_POSITION_ONLY = 0,
  EXW_EXIT_MODE_INVERSION = 1,
  EXW_EXIT_MODE_TABLE = 2,
} ExwExitMode;

// Random stream (seed, stream id).
typedef struct ExwRng ExwRng;

// Spectral series of the Bessel level-hitting time.
typedef struct ExwSpectral ExwSpectral;

// Table of unit-ball exit times.
typedef struct ExwTable ExwTable;

// Prepared inputs of the walk on spheres.
typedef struct ExwWosContext ExwWosContext;

// Scalar outcome of one trajectory.
typedef struct ExwExit {
  double exit_time;
  uint64_t steps;
} ExwExit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into the library from the same thread.
const char *exw_last_error(void);

// Build identifier, a static NUL-terminated string.
const char *exw_version(void);

// New random stream; never NULL.
struct ExwRng *exw_rng_new(uint64_t seed, uint64_t stream_id);

void exw_rng_free(struct ExwRng *rng);

// Uniform draw on (0, 1].
enum ExwStatus exw_rng_uniform(struct ExwRng *rng, double *value);

// Moving-sphere parameter `a` for distance `d` and safety factor `gamma`.
enum ExwStatus exw_moving_sphere_param_a(double d, double gamma, uint32_t delta, double *a);

// Moving boundary `psi(t)` for parameter `a`.
enum ExwStatus exw_psi(double a, uint32_t delta, double t, double *value);

// Density of the hitting time of the moving boundary.
enum ExwStatus exw_hitting_pdf(double a, uint32_t delta, double t, double *value);

// Draw of the moving-boundary hitting time.
enum ExwStatus exw_sample_tau_psi(double a, uint32_t delta, struct ExwRng *rng, double *value);

// Laplace transform `E_x exp(-lambda tau_L)` of the Bessel level-hitting time.
enum ExwStatus exw_laplace_transform(double lambda,
                                     double x,
                                     double radius,
                                     uint32_t delta,
                                     double *value);

enum ExwStatus exw_spectral_new(uint32_t delta, double radius, struct ExwSpectral **cache);

void exw_spectral_free(struct ExwSpectral *cache);

// Survival function `P_0(tau_L > t)`.
enum ExwStatus exw_tail_spectral(const struct ExwSpectral *cache, double t, double *value);

// Quantile `F^{-1}(u)` of the level-hitting time, default tolerance.
enum ExwStatus exw_invert_cdf(const struct ExwSpectral *cache, double u, double *value);

enum ExwStatus exw_table_precompute(size_t count,
                                    uint32_t delta,
                                    enum ExwTableMethod method,
                                    double h,
                                    struct ExwRng *rng,
                                    struct ExwTable **table);

enum ExwStatus exw_table_load(const char *path, struct ExwTable **table);

enum ExwStatus exw_table_save(const struct ExwTable *table, const char *path);

// Number of samples, 0 for NULL.
size_t exw_table_count(const struct ExwTable *table);

// Borrowed pointer to the samples, valid while the table lives; NULL for NULL.
const double *exw_table_samples(const struct ExwTable *table);

void exw_table_free(struct ExwTable *table);

// Inputs of the walk on spheres in dimension `delta`. `table` (cloned) is
// required for table mode and ignored otherwise.
enum ExwStatus exw_wos_context_new(uint32_t delta,
                                   enum ExwExitMode mode,
                                   const struct ExwTable *table,
                                   struct ExwWosContext **context);

void exw_wos_context_free(struct ExwWosContext *context);

// One walk-on-moving-spheres trajectory. `x0`, and the optional position
// buffers, hold `delta` doubles.
enum ExwStatus exw_woms_run(const double *x0,
                            uint32_t delta,
                            double radius,
                            double epsilon,
                            double gamma,
                            struct ExwRng *rng,
                            struct ExwExit *result,
                            double *exit_position,
                            double *projected_position);

// One walk-on-spheres trajectory with the context's dimension and mode.
enum ExwStatus exw_wos_run(const struct ExwWosContext *context,
                           const double *x0,
                           double radius,
                           double epsilon,
                           struct ExwRng *rng,
                           struct ExwExit *result,
                           double *exit_position,
                           double *projected_position);

// One naive Euler trajectory with step `h`.
enum ExwStatus exw_euler_run(const double *x0,
                             uint32_t delta,
                             double radius,
                             double h,
                             struct ExwRng *rng,
                             struct ExwExit *result,
                             double *exit_position,
                             double *projected_position);

// Runs an experiment described by a JSON configuration (the `config` object
// of a run report) and returns the full run report as JSON. Release the
// string with [`exw_string_free`].
enum ExwStatus exw_run_experiment_json(const char *config_json, char **report_json);

void exw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXITWALK_H */
