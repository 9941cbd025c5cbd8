/* SPDX-License-Identifier: Apache-2.0 */
#ifndef VISCOFIT_H
#define VISCOFIT_H

/*
 * C interface to the viscofit library: forward simulation of generalized
 * Maxwell relaxation experiments and recovery of the material parameters
 * from stress-time data.
 *
 * Conventions:
 *   - every function returns vf_status; VF_OK means success,
 *   - on failure vf_last_error() returns a thread-local message,
 *   - objects returned through vf_*al** out parameters are owned by the caller
 *     and released with the matching vf_*_free,
 *   - configuration documents are JSON strings (see the project README for
 *     the schemas); NULL or "" selects the defaults,
 *   - parameter order in flat arrays is mu_1..mu_n for stiffness [MPa] and
 *     tau_1..tau_n for relaxation times [s], times in seconds, strain in
 *     percent, rates in percent per second.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VISCOFIT_API __declspec(dllexport)
#else
#define VISCOFIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vf_status {
  VF_OK = 0,
  VF_ERROR_ARGUMENT = 1,
  VF_ERROR_CONFIG = 2,
  VF_ERROR_FIT = 3,
  VF_ERROR_IO = 4
} vf_status;

VISCOFIT_API const char* vf_status_name(vf_status status);

/* Message describing the most recent failure on this thread. */
VISCOFIT_API const char* vf_last_error(void);

VISCOFIT_API const char* vf_version(void);

/* Ramp-and-hold strain program: strain ramps at `rate` to `max_strain`,
 * then holds until `horizon`. */
typedef struct vf_program {
  double rate;
  double max_strain;
  double horizon;
} vf_program;

typedef struct vf_model vf_model;
typedef struct vf_dataset vf_dataset;
typedef struct vf_fit_result vf_fit_result;
typedef struct vf_cluster_report vf_cluster_report;

/* ---- material models -------------------------------------------------- */

VISCOFIT_API vf_status vf_model_create(double base_stiffness, const double* stiffness,
                                       const double* relaxation_time, size_t count,
                                       vf_model** out);
VISCOFIT_API vf_status vf_model_from_json(const char* json, vf_model** out);
VISCOFIT_API vf_status vf_model_to_json(const vf_model* model, char** out);
VISCOFIT_API void vf_model_free(vf_model* model);

VISCOFIT_API size_t vf_model_element_count(const vf_model* model);
VISCOFIT_API double vf_model_base_stiffness(const vf_model* model);
VISCOFIT_API vf_status vf_model_element(const vf_model* model, size_t index, double* stiffness,
                                        double* relaxation_time);

/* ---- forward model ----------------------------------------------------- */

VISCOFIT_API vf_status vf_strain_at(vf_program program, double t, double* out);
VISCOFIT_API vf_status vf_stress_at(const vf_model* model, vf_program program, double t,
                                    double* out);
/* out: count values */
VISCOFIT_API vf_status vf_stress_series(const vf_model* model, vf_program program,
                                        const double* times, size_t count, double* out);
/* out: (n+1) x count row-major, spring first */
VISCOFIT_API vf_status vf_stress_decomposition(const vf_model* model, vf_program program,
                                               const double* times, size_t count, double* out);
/* out: count x (2n+1) row-major, columns mu, mu_1..mu_n, tau_1..tau_n */
VISCOFIT_API vf_status vf_stress_jacobian(const vf_model* model, vf_program program,
                                          const double* times, size_t count, double* out);

/* ---- datasets ---------------------------------------------------------- */

VISCOFIT_API vf_status vf_dataset_simulate(const vf_model* model, vf_program program,
                                           size_t intervals, vf_dataset** out);
VISCOFIT_API vf_status vf_dataset_add_noise(const vf_dataset* d, double target_rel,
                                            uint64_t seed, vf_dataset** out);
VISCOFIT_API vf_status vf_dataset_truncate(const vf_dataset* d, double t_cut, vf_dataset** out);
VISCOFIT_API vf_status vf_dataset_read(const char* path, vf_dataset** out);
VISCOFIT_API vf_status vf_dataset_write(const vf_dataset* d, const char* path);
VISCOFIT_API void vf_dataset_free(vf_dataset* d);

VISCOFIT_API size_t vf_dataset_size(const vf_dataset* d);
/* either output may be NULL; non-NULL buffers receive vf_dataset_size values */
VISCOFIT_API vf_status vf_dataset_samples(const vf_dataset* d, double* times, double* stresses);
VISCOFIT_API vf_status vf_dataset_program(const vf_dataset* d, vf_program* out);
VISCOFIT_API vf_status vf_dataset_set_program(vf_dataset* d, vf_program program);
/* achieved relative noise level, 0 for clean data */
VISCOFIT_API double vf_dataset_noise_rel(const vf_dataset* d);

/* ---- fitting and clustering -------------------------------------------- */

VISCOFIT_API vf_status vf_fit(const vf_dataset* d, const char* fit_config_json, int threads,
                              vf_fit_result** out);
VISCOFIT_API vf_status vf_fit_result_from_json(const char* json, vf_fit_result** out);
VISCOFIT_API vf_status vf_fit_result_to_json(const vf_fit_result* r, char** out);
VISCOFIT_API vf_status vf_fit_result_model(const vf_fit_result* r, vf_model** out);
VISCOFIT_API double vf_fit_result_residual(const vf_fit_result* r);
VISCOFIT_API double vf_fit_result_cost(const vf_fit_result* r);
VISCOFIT_API void vf_fit_result_free(vf_fit_result* r);

VISCOFIT_API vf_status vf_cluster(const vf_fit_result* fit, const vf_dataset* d,
                                  const char* cluster_config_json, const char* fit_config_json,
                                  int threads, vf_cluster_report** out);
VISCOFIT_API vf_status vf_cluster_report_to_json(const vf_cluster_report* r, char** out);
VISCOFIT_API vf_status vf_cluster_report_model(const vf_cluster_report* r, vf_model** out);
VISCOFIT_API size_t vf_cluster_report_count(const vf_cluster_report* r);
VISCOFIT_API void vf_cluster_report_free(vf_cluster_report* r);

/* ---- experiment runners ------------------------------------------------ */
/* Each runner writes CSV/JSON/SVG artifacts under out_dir and, when
 * report_json is non-NULL, returns the report document (vf_string_free). */

VISCOFIT_API vf_status vf_run_exact_recovery(const char* spec_json, const char* out_dir,
                                             char** report_json);
VISCOFIT_API vf_status vf_run_noise_sweep(const char* spec_json, const char* out_dir,
                                          char** report_json);
VISCOFIT_API vf_status vf_run_rate_comparison(const char* spec_json, const char* out_dir,
                                              char** report_json);
VISCOFIT_API vf_status vf_run_regularizer_comparison(const char* spec_json, const char* out_dir,
                                                     char** report_json);
VISCOFIT_API vf_status vf_run_truncation_study(const char* spec_json, const char* out_dir,
                                               char** report_json);
/* Re-emits CSV tables and SVG plots from a previously written report.json. */
VISCOFIT_API vf_status vf_rerender_report(const char* report_json_path, const char* out_dir,
                                          char** report_json);

VISCOFIT_API void vf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* VISCOFIT_H */
