/* C interface to the MUCOGARCH library.
 *
 * Conventions:
 *   - Every function returning int yields 0 (MCG_OK) on success or a nonzero
 *     status code; mcg_status_name() names it and mcg_last_error() holds a
 *     thread-local human-readable message for the most recent failure on the
 *     calling thread.
 *   - Strings returned through char** out parameters are heap-allocated and
 *     must be released with mcg_string_free(). Strings returned directly
 *     (version, names, last error) are static or thread-local; do not free.
 *   - Handles are opaque; free them with the matching *_free(). Passing NULL
 *     where a handle or out pointer is required yields MCG_INVALID_CONFIG.
 *   - JSON in and out is UTF-8 text. Model JSON:
 *       {"d", "A", "B", "C", "sigma_W", "cpp_rate", "jump_scale", "delta"}
 *     with matrices as row-major nested arrays.
 */
#ifndef MUCOGARCH_H
#define MUCOGARCH_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MCG_API __declspec(dllexport)
#else
#define MCG_API __attribute__((visibility("default")))
#endif

/* Status codes. 0 is success; the rest match the library's error taxonomy. */
enum {
  MCG_OK = 0,
  MCG_INVALID_CONFIG = 1,
  MCG_PARSE_ERROR = 2,
  MCG_SHAPE_ERROR = 3,
  MCG_RUNTIME_ERROR = 4 /* any other library error; see mcg_last_error() */
};

typedef struct mcg_model mcg_model;   /* parameters + noise spec + grid width */
typedef struct mcg_sample mcg_sample; /* observed or simulated return series */

/* Library identity and error reporting. */
MCG_API const char* mcg_version(void);
MCG_API const char* mcg_status_name(int status);
MCG_API const char* mcg_last_error(void); /* thread-local; valid until next API call */
MCG_API void mcg_string_free(char* s);

/* Model handles. */
MCG_API int mcg_model_from_json(const char* json_text, mcg_model** out);
MCG_API int mcg_model_from_file(const char* path, mcg_model** out);
MCG_API int mcg_model_to_json(const mcg_model* m, char** out_json);
MCG_API void mcg_model_free(mcg_model* m);

/* Sample handles. delta_override > 0 forces the grid width; otherwise the
 * CSV must carry a time column. */
MCG_API int mcg_sample_from_csv(const char* path, double delta_override, mcg_sample** out);
MCG_API int mcg_sample_dims(const mcg_sample* s, long long* n, int* d, double* delta);
MCG_API int mcg_sample_scale(mcg_sample* s, double factor);
MCG_API int mcg_sample_write_csv(const mcg_sample* s, const char* path);
MCG_API int mcg_sample_write_vol_csv(const mcg_sample* s, const char* path);
MCG_API void mcg_sample_free(mcg_sample* s);

/* Simulation. n is the number of returns; euler_substeps >= 1 splits each
 * grid interval for the Brownian part; burn_in < 0 selects the stationary
 * default; collect_vol != 0 retains the volatility path for
 * mcg_sample_write_vol_csv. */
MCG_API int mcg_simulate(const mcg_model* m, long long n, int euler_substeps, double burn_in,
                         unsigned long long seed, unsigned long long replicate, int collect_vol,
                         mcg_sample** out);

/* Closed-form moment vector of the model at max lag r, as JSON. */
MCG_API int mcg_model_moments(const mcg_model* m, int r, char** out_json);

/* Empirical moment vector of a sample at max lag r, as JSON.
 * divisor_n_minus_r != 0 divides lag sums by n - r instead of n. */
MCG_API int mcg_sample_moments(const mcg_sample* s, int r, int divisor_n_minus_r, char** out_json);

/* Stationarity / mixing / moment / identifiability condition report at the
 * model's parameters, as JSON with per-condition status and an all_pass flag.
 * mc_samples sizes the Monte-Carlo integrals (<= 0 selects the default). */
MCG_API int mcg_check(const mcg_model* m, long long mc_samples, unsigned long long seed,
                      char** out_json);

/* Closed-form parameter recovery from a moment vector (JSON, as produced by
 * mcg_model_moments / mcg_sample_moments). The model supplies the noise
 * constants; grid width is taken from the moment vector itself. */
MCG_API int mcg_recover(const mcg_model* noise, const char* moments_json, char** out_json);

/* GMM estimation on a sample. The model supplies the noise constants and,
 * when options select init "model", the starting parameters. Options JSON:
 *   {
 *     "r": int,                       required, >= 2
 *     "weight": "identity" | "basic" | "truncated" | "diag",   default "identity"
 *     "cov_M": int,                   truncation lag, required for "truncated"
 *     "two_step": bool,               default false; weight names the step-2
 *                                     covariance estimator and must not be
 *                                     "identity"
 *     "init": "model" | "moment" | "theta",   default "model"
 *     "theta_init": [10 numbers],     required for init "theta"
 *     "box_lo", "box_hi": [10 numbers] each,  optional explicit search box
 *     "box_frac": double,             default 0.5, half-width of the default
 *                                     box around the starting point
 *     "max_evals": int, "rel_f_tol": double,  optimizer budget and tolerance
 *     "attach_report": bool,          default true, condition report at the fit
 *     "report_mc_samples": int, "report_seed": uint64
 *   }
 * Result is an estimation-result JSON document. */
MCG_API int mcg_estimate(const mcg_sample* s, const mcg_model* noise, const char* options_json,
                         char** out_json);

/* Monte-Carlo replication study driven by a config JSON document. threads
 * <= 0 selects MUCOGARCH_THREADS or the hardware count; output_dir may be
 * NULL or empty to skip writing summary.json / bias_std.csv / qq CSVs.
 * Returns the summary JSON. */
MCG_API int mcg_study(const char* config_json, const char* output_dir, int threads,
                      char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MUCOGARCH_H */
