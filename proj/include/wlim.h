/*
 * wlim — weighted linear discriminants for imbalanced binary classification.
 *
 * C API over the core library. All functions return a wlim_status; structured
 * results come back as JSON strings to be released with wlim_string_free, and
 * numeric buffers with wlim_buffer_free. On failure, wlim_last_error() holds
 * a thread-local message describing what went wrong.
 */
#ifndef WLIM_H
#define WLIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WLIM_API __declspec(dllexport)
#else
#define WLIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wlim_status {
    WLIM_OK = 0,
    WLIM_ERR_INVALID = 1, /* bad arguments or malformed specs */
    WLIM_ERR_NUMERIC = 2, /* solver or saturation failure */
    WLIM_ERR_IO = 3       /* file problems */
} wlim_status;

WLIM_API const char* wlim_version(void);
WLIM_API const char* wlim_last_error(void);
WLIM_API void wlim_string_free(char* s);
WLIM_API void wlim_buffer_free(double* p);

/* ---- weight functions -------------------------------------------------- */

typedef struct wlim_weight wlim_weight;

/* spec: "logistic" | "exp:<lambda>" | "polyleft:<k>" | "delta:<u0>" */
WLIM_API wlim_status wlim_weight_create(const char* spec, wlim_weight** out);
WLIM_API void wlim_weight_free(wlim_weight* w);

/* values = { w, w', U, V, V' }; *saturated set to 1 when an exponent was
 * clamped. */
WLIM_API wlim_status wlim_weight_eval(const wlim_weight* w, double u, double values[5],
                                      int* saturated);

/* Condition report over a uniform grid of `points` values on [lo, hi]. */
WLIM_API wlim_status wlim_weight_validate(const wlim_weight* w, double lo, double hi, int points,
                                          char** json_out);

/* Left-tail classification (family, exponent, numeric probe). */
WLIM_API wlim_status wlim_weight_tail(const wlim_weight* w, char** json_out);

/* ---- datasets ----------------------------------------------------------- */

typedef struct wlim_dataset wlim_dataset;

WLIM_API wlim_status wlim_dataset_load_csv(const char* csv_path, const char* schema_path,
                                           int standardize, wlim_dataset** out);
/* Row-major features with 0/1 labels, minority = 1. */
WLIM_API wlim_status wlim_dataset_from_arrays(const double* features, size_t rows, size_t cols,
                                              const int* labels, wlim_dataset** out);
WLIM_API void wlim_dataset_free(wlim_dataset* ds);
WLIM_API wlim_status wlim_dataset_info(const wlim_dataset* ds, char** json_out);

/* ---- fitting ------------------------------------------------------------ */

/* options: key=value pairs separated by commas; recognized keys:
 *   warm=zero|gaussian, max_iter=<int>, tol=<float>, surrounding=0|1
 * Pass NULL or "" for defaults. JSON result carries alpha, beta, gradient
 * norm, iteration count, convergence flag, and the surrounding diagnostic. */
WLIM_API wlim_status wlim_fit(const wlim_weight* w, const wlim_dataset* ds, const char* options,
                              char** json_out);

/* Scores alpha + beta'x for row-major data; out must hold `rows` values. */
WLIM_API wlim_status wlim_score(const double* features, size_t rows, size_t cols, double alpha,
                                const double* beta, double* out);

/* ---- infinite-imbalance limits ------------------------------------------ */

/* majority_spec: "gaussian:<means...,var>" | "gaussian:<means>;<cov>" |
 * "csv:<path>" | "inline:<points>". minority: row-major sample. */
WLIM_API wlim_status wlim_solve_limit(double lambda, const char* majority_spec,
                                      const double* minority, size_t rows, size_t cols,
                                      char** json_out);

/* Closed form for two Gaussian classes; buffers are length d (means) and d*d
 * row-major (covariances); out_beta must hold d values. */
WLIM_API wlim_status wlim_solve_limit_gaussian(double lambda, const double* mu0, const double* cov0,
                                               const double* mu1, const double* cov1, size_t d,
                                               double* out_beta);

/* ---- metrics ------------------------------------------------------------ */

/* JSON holds thresholds/fpr/tpr arrays plus the AUC. */
WLIM_API wlim_status wlim_roc(const double* scores0, size_t n0, const double* scores1, size_t n1,
                              char** json_out);

/* orientation: "spec" (false-positive band [0, bound]) or "sens"
 * (true-positive band [bound, 1]). bootstrap <= 0 skips the interval. */
WLIM_API wlim_status wlim_pauc(const double* scores0, size_t n0, const double* scores1, size_t n1,
                               const char* orientation, double bound, int bootstrap, double level,
                               uint64_t seed, char** json_out);

WLIM_API wlim_status wlim_calibrate(const double* scores1, size_t n1, double target_tpr,
                                    double* out_threshold);

/* ---- upsampling ---------------------------------------------------------- */

/* method "fstar": majority_spec + beta (length cols) tilt the majority law;
 * method "smote": minority rows are interpolated with k neighbors. Returns a
 * freshly allocated row-major matrix in *out (m rows, cols columns). */
WLIM_API wlim_status wlim_upsample_fstar(const char* majority_spec, const double* beta, size_t cols,
                                         size_t m, uint64_t seed, double** out);
WLIM_API wlim_status wlim_upsample_smote(const double* minority, size_t rows, size_t cols, int k,
                                         size_t m, uint64_t seed, double** out);

/* ---- experiments ---------------------------------------------------------- */

/* name: convergence | pauc-study | delta-demo | protocol. config: key=value
 * lines (newline separated). Writes CSV + summary.json under out_dir and
 * returns the summary. */
WLIM_API wlim_status wlim_run_experiment(const char* name, const char* config, const char* out_dir,
                                         char** json_summary);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WLIM_H */
