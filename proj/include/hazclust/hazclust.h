#ifndef HAZCLUST_H
#define HAZCLUST_H

/*
 * hazclust: joint clustering and shared-frailty survival modelling.
 *
 * All functions return an hc_status. On failure, hc_last_error() returns a
 * message for the calling thread, valid until that thread's next call.
 * Handles are opaque and must be released with the matching *_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HC_API __declspec(dllexport)
#else
#define HC_API __attribute__((visibility("default")))
#endif

typedef enum hc_status {
    HC_OK = 0,
    HC_ERR_INVALID_ARGUMENT = 1,
    HC_ERR_CONFIG = 2,
    HC_ERR_SCHEMA = 3,
    HC_ERR_NUMERICAL = 4,
    HC_ERR_IO = 5,
    HC_ERR_INTERNAL = 6
} hc_status;

typedef enum hc_baseline { HC_BASELINE_WEIBULL = 0, HC_BASELINE_EXPONENTIAL = 1 } hc_baseline;
typedef enum hc_frailty { HC_FRAILTY_GAMMA = 0, HC_FRAILTY_INVERSE_GAUSSIAN = 1 } hc_frailty;

typedef struct hc_dataset hc_dataset;
typedef struct hc_fit_result hc_fit_result;

HC_API const char* hc_version(void);
HC_API const char* hc_last_error(void);
HC_API const char* hc_status_name(hc_status status);

/* ---- datasets ---- */

/* CSV with columns unit_id, group_id, time, status and numeric covariates. */
HC_API hc_status hc_dataset_read_csv(const char* path, hc_dataset** out);

/* x is row-major n x d. covariate_names may be NULL when d == 0. */
HC_API hc_status hc_dataset_create(size_t n, size_t d, const char* const* unit_ids, const char* const* group_ids,
                                   const double* time, const int* status, const double* x,
                                   const char* const* covariate_names, hc_dataset** out);
HC_API hc_status hc_dataset_write_csv(const hc_dataset* data, const char* path);
HC_API void hc_dataset_free(hc_dataset* data);
HC_API size_t hc_dataset_num_units(const hc_dataset* data);
HC_API size_t hc_dataset_num_groups(const hc_dataset* data);
HC_API size_t hc_dataset_num_covariates(const hc_dataset* data);
/* Ground-truth cluster labels of a simulated dataset; HC_ERR_INVALID_ARGUMENT if absent. */
HC_API hc_status hc_dataset_true_clusters(const hc_dataset* data, int* out, size_t len);

/* Default simulation design with the given seed and censoring (0 administrative, 1 normal). */
HC_API hc_status hc_simulate_default(uint64_t seed, int censoring, hc_dataset** out);

/* ---- fitting ---- */

typedef struct hc_fit_options {
    hc_baseline baseline;
    hc_frailty frailty;
    double gamma;
    int C;
    int k;
    double lambda0;
    double tol_s;
    double tol_ll;
    int maxit;
    int maxit_inner;
    uint64_t seed;
} hc_fit_options;

/* Library defaults: Weibull/Gamma, gamma 0, C 2, k 10, lambda0 1000,
 * tolS 1e-4, tolll 1e-3, maxit 500, maxit_inner 500, seed 0. */
HC_API void hc_fit_options_default(hc_fit_options* opts);

/* A numerical failure mid-fit still yields a result (status HC_ERR_NUMERICAL
 * with *out set); check hc_fit_message. */
HC_API hc_status hc_fit(const hc_dataset* data, const hc_fit_options* opts, hc_fit_result** out);
HC_API void hc_fit_result_free(hc_fit_result* result);

HC_API int hc_fit_converged(const hc_fit_result* r);
HC_API int hc_fit_iterations(const hc_fit_result* r);
HC_API int hc_fit_num_clusters(const hc_fit_result* r);
HC_API double hc_fit_loglik(const hc_fit_result* r);
HC_API double hc_fit_theta(const hc_fit_result* r);
/* Returns NaN when fewer than two clusters. */
HC_API double hc_fit_silhouette(const hc_fit_result* r);
HC_API const char* hc_fit_message(const hc_fit_result* r);
HC_API hc_status hc_fit_labels(const hc_fit_result* r, int* out, size_t len);
HC_API hc_status hc_fit_beta(const hc_fit_result* r, double* out, size_t len);
/* Weibull: {rho, xi}; Exponential: {rate}. *count receives the number written. */
HC_API hc_status hc_fit_baseline(const hc_fit_result* r, double* out, size_t len, size_t* count);
HC_API hc_status hc_fit_risk_scores(const hc_fit_result* r, double* out, size_t len);
/* Writes fit_report.json, labels.csv and optionally similarity.csv into dir. */
HC_API hc_status hc_fit_write(const hc_fit_result* r, const hc_dataset* data, const char* dir, int emit_similarity);

/* ---- numerics ---- */

/* log[(-1)^k L^(k)(s)] for the unit-mean frailty law with parameter theta. */
HC_API hc_status hc_log_laplace_deriv(hc_frailty family, double theta, int k, double s, double* out);

/* ---- commands (as used by the CLI) ---- */

typedef struct hc_run_options {
    const char* config_path;  /* NULL: all defaults */
    const char* input;        /* NULL: keep config value */
    const char* output_dir;   /* NULL: keep config value */
    int has_seed;
    uint64_t seed;
    int threads;              /* < 0: keep config value */
    int emit_similarity;      /* < 0: keep config value */
} hc_run_options;

HC_API void hc_run_options_default(hc_run_options* opts);
HC_API hc_status hc_run_simulate(const hc_run_options* opts);
HC_API hc_status hc_run_fit(const hc_run_options* opts);
HC_API hc_status hc_run_benchmark(const hc_run_options* opts);
HC_API hc_status hc_run_scan(const hc_run_options* opts);

#ifdef __cplusplus
}
#endif

#endif
