/* C declarations for the sdrkdg solver library (libsdrkdg_ffi).
 *
 * Status codes: 0 success, 2 configuration error, 3 numerical blow-up,
 * 4 internal error. After any nonzero status, sdrkdg_last_error() returns
 * the message for the calling thread.
 *
 * Configs are JSON documents with the same schema the sdrkdg CLI accepts,
 * e.g. {"scenario":"advection","scheme":"ssprk2_sd","n":160,"cfl":0.3}.
 */
#ifndef SDRKDG_H
#define SDRKDG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Summary of a completed run. Norm fields are NaN when the scenario has no
 * exact solution. */
typedef struct SdrkdgSummary {
    uint64_t n_steps;
    double t_final;
    double l1;
    double l2;
    double linf;
    double eps_star;
} SdrkdgSummary;

/* Opaque handle to an in-memory solution. */
typedef struct SdrkdgRun SdrkdgRun;

/* Copy the calling thread's most recent error message into buf (NUL
 * terminated, truncated to len bytes). Returns the full message length.
 * buf may be NULL to query the length. */
size_t sdrkdg_last_error(char *buf, size_t len);

/* Run a scenario from a JSON config and write its output files.
 * out may be NULL. Returns a status code. */
int32_t sdrkdg_run(const char *config_json, SdrkdgSummary *out);

/* Maximum stable CFL number of a built-in scheme at degree k. */
int32_t sdrkdg_max_cfl(const char *scheme, int32_t k, double *out);

/* Fully discrete worst sample-point error prediction for smooth advection
 * of e^{ix} on n_cells cells at CFL lambda, marched to t_end. */
int32_t sdrkdg_predicted_error(const char *scheme, int32_t k, double lambda,
                               int32_t n_cells, double t_end, double *out);

/* Run a scenario and keep the solution in memory (no files written).
 * Returns NULL on failure; status (may be NULL) receives the code.
 * Release with sdrkdg_run_free. */
SdrkdgRun *sdrkdg_run_open(const char *config_json, int32_t *status);

/* Number of (active) cells in the run's mesh. */
int32_t sdrkdg_run_n_cells(const SdrkdgRun *run);

/* Number of solution components. */
int32_t sdrkdg_run_n_components(const SdrkdgRun *run);

/* Copy cell-center coordinates into buf: x per cell in 1D, x,y pairs in 2D.
 * Returns the number of doubles required; copies only when len suffices.
 * buf may be NULL to query the size. */
size_t sdrkdg_run_coords(const SdrkdgRun *run, double *buf, size_t len);

/* Copy cell averages into buf, cell-major with n_components doubles per
 * cell. Returns the number of doubles required; copies only when len
 * suffices. buf may be NULL to query the size. */
size_t sdrkdg_run_averages(const SdrkdgRun *run, double *buf, size_t len);

/* Release a run handle. NULL is allowed. */
void sdrkdg_run_free(SdrkdgRun *run);

/* Built-in scenario names as a NUL-separated, double-NUL terminated list. */
const char *sdrkdg_scenario_names(void);

#ifdef __cplusplus
}
#endif

#endif /* SDRKDG_H */
