/* skybright C API: geostatistical bias correction for citizen-science
 * sky-brightness data.
 *
 * All functions returning sb_status put a human-readable message behind
 * sb_last_error() on failure. Handles are opaque; every sb_*_new/_fit
 * output must be released with the matching sb_*_free. Handles are
 * immutable after creation and safe to share across threads for reads.
 */
#ifndef SKYBRIGHT_H
#define SKYBRIGHT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sb_status {
  SB_OK = 0,
  SB_ERROR_INVALID_ARGUMENT = 1, /* bad parameter or inconsistent sizes */
  SB_ERROR_IO = 2,               /* file missing, unreadable, or malformed */
  SB_ERROR_NUMERIC = 3,          /* singular system or failed optimization */
  SB_ERROR_INTERNAL = 4
} sb_status;

/* Message for the most recent failure on this thread. */
const char* sb_last_error(void);

const char* sb_version(void);

/* Reference text for every pipeline config key with its default. */
const char* sb_config_reference(void);

/* ------------------------------------------------------------ variogram */

typedef struct sb_variogram sb_variogram;

/* Fit a variogram model to (x, y, z) samples: the empirical variogram uses
 * n_bins equal-width lag bins up to cutoff_km (pass 0 for max distance / 3),
 * then a weighted-least-squares parametric fit. family is "spherical",
 * "exponential", or "gaussian". */
sb_status sb_variogram_fit(const double* x_km, const double* y_km, const double* z,
                           size_t n, const char* family, double cutoff_km,
                           int n_bins, sb_variogram** out);

/* Build a variogram model directly from parameters. */
sb_status sb_variogram_create(const char* family, double nugget,
                              double partial_sill, double range_km,
                              sb_variogram** out);

sb_status sb_variogram_params(const sb_variogram* v, double* nugget,
                              double* partial_sill, double* range_km);

/* Semivariance at lag h_km; returns a negative value on error. */
double sb_variogram_gamma(const sb_variogram* v, double h_km);

void sb_variogram_free(sb_variogram* v);

/* -------------------------------------------------------------- kriging */

typedef struct sb_kriging sb_kriging;

/* Fit a universal-kriging model. drift is row-major n x p (pass NULL with
 * p = 0 for ordinary kriging; an intercept column is added internally).
 * Duplicate locations are averaged. */
sb_status sb_kriging_fit(const double* x_km, const double* y_km, const double* z,
                         size_t n, const double* drift, size_t p,
                         const sb_variogram* variogram, sb_kriging** out);

/* Predict at one target. target_drift must carry p values matching the fit
 * (NULL when p = 0). Outputs may be NULL when not wanted. */
sb_status sb_kriging_predict(const sb_kriging* k, double x_km, double y_km,
                             const double* target_drift, size_t p, double* mean,
                             double* variance);

/* Exact leave-one-out cross-validated MSE of the fitted model. */
sb_status sb_kriging_loocv_mse(const sb_kriging* k, double* mse);

void sb_kriging_free(sb_kriging* k);

/* ------------------------------------------------------------- pipeline */

typedef struct sb_pipeline sb_pipeline;

/* Create a pipeline from a config file; pass NULL for defaults only. */
sb_status sb_pipeline_new(const char* config_path, sb_pipeline** out);

/* Override one config key (takes precedence over the file). */
sb_status sb_pipeline_set(sb_pipeline* p, const char* key, const char* value);

sb_status sb_pipeline_set_threads(sb_pipeline* p, int threads);

/* Run one subcommand: enrich, fit, predict, validate, skyglow, infer, or
 * simulate. Artifacts are written to the configured output_dir. */
sb_status sb_pipeline_run(sb_pipeline* p, const char* subcommand);

/* Warnings accumulated across runs of this pipeline. */
size_t sb_pipeline_warning_count(const sb_pipeline* p);
const char* sb_pipeline_warning(const sb_pipeline* p, size_t index);

void sb_pipeline_free(sb_pipeline* p);

#ifdef __cplusplus
}
#endif

#endif /* SKYBRIGHT_H */
