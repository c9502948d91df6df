/*
 * infsel: informative-selection simulation laboratory, C API.
 *
 * The library simulates sample selection from finite populations, evaluates
 * the weighted limit distribution the selection induces, and measures
 * sup-norm convergence of the unweighted empirical c.d.f. and its quantiles.
 *
 * All objects are opaque handles created by infsel_*_create functions and
 * released by the matching infsel_*_free (free functions accept NULL).
 * Every fallible call returns an infsel_status; on failure the thread-local
 * message from infsel_last_error() describes the problem. Strings returned
 * through char** out-parameters are owned by the caller and must be released
 * with infsel_string_free.
 */
#ifndef INFSEL_H
#define INFSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define INFSEL_API __declspec(dllexport)
#else
#define INFSEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum infsel_status {
  INFSEL_OK = 0,
  INFSEL_ERR_INVALID_ARGUMENT = 1,
  INFSEL_ERR_CONFIG = 2,
  INFSEL_ERR_UNSUPPORTED = 3,
  INFSEL_ERR_INFEASIBLE = 4,
  INFSEL_ERR_NO_LIMIT = 5,
  INFSEL_ERR_RUNTIME = 6,
  INFSEL_ERR_IO = 7
} infsel_status;

typedef struct infsel_model infsel_model;
typedef struct infsel_design infsel_design;
typedef struct infsel_population infsel_population;
typedef struct infsel_indicator infsel_indicator;
typedef struct infsel_step_cdf infsel_step_cdf;
typedef struct infsel_limit_cdf infsel_limit_cdf;
typedef struct infsel_coupling infsel_coupling;

INFSEL_API const char* infsel_version(void);
/* Thread-local message for the most recent failing call on this thread. */
INFSEL_API const char* infsel_last_error(void);
INFSEL_API void infsel_string_free(char* s);

/* ---- superpopulation models -------------------------------------------- */

/* spec: {"kind":"uniform","a":0.5,"b":1.5}, {"kind":"truncated_exponential",
 * "rate":1,"a":0,"b":2} or {"kind":"piecewise_linear","knots":[[y,f],...]}. */
INFSEL_API infsel_status infsel_model_create_json(const char* json_spec, infsel_model** out);
INFSEL_API void infsel_model_free(infsel_model* model);
INFSEL_API infsel_status infsel_model_density(const infsel_model* model, double y, double* out);
INFSEL_API infsel_status infsel_model_cdf(const infsel_model* model, double alpha, double* out);
INFSEL_API infsel_status infsel_model_quantile(const infsel_model* model, double u, double* out);
INFSEL_API infsel_status infsel_model_moment(const infsel_model* model, int k, double* out);
INFSEL_API infsel_status infsel_model_support(const infsel_model* model, double* lo, double* hi);

INFSEL_API infsel_status infsel_population_draw(const infsel_model* model, int64_t n, uint64_t seed,
                                                infsel_population** out);
/* Wraps caller-provided responses (copied). */
INFSEL_API infsel_status infsel_population_create(const double* values, int64_t n,
                                                  infsel_population** out);
INFSEL_API void infsel_population_free(infsel_population* population);
INFSEL_API infsel_status infsel_population_size(const infsel_population* population, int64_t* out);
INFSEL_API infsel_status infsel_population_values(const infsel_population* population,
                                                  const double** data, int64_t* len);

/* ---- selection designs -------------------------------------------------- */

/* spec: {"variant":"length_biased","tau":0.5}, {"variant":"srswor","n":3},
 * {"variant":"cutoff","tau":0.3,"rate":0.5,"mode":"take_all"}, ... */
INFSEL_API infsel_status infsel_design_create_json(const char* json_spec, infsel_design** out);
INFSEL_API void infsel_design_free(infsel_design* design);
INFSEL_API infsel_status infsel_design_sample(const infsel_design* design,
                                              const infsel_population* population, uint64_t seed,
                                              infsel_indicator** out);
INFSEL_API infsel_status infsel_design_expected_sample_size(const infsel_design* design,
                                                            const infsel_population* population,
                                                            double* out);
/* CSV with header indicator,probability; one row per support point. */
INFSEL_API infsel_status infsel_design_enumerate_csv(const infsel_design* design,
                                                     const infsel_population* population,
                                                     char** out_csv);
INFSEL_API void infsel_indicator_free(infsel_indicator* indicator);
INFSEL_API infsel_status infsel_indicator_counts(const infsel_indicator* indicator,
                                                 const int32_t** data, int64_t* len);
INFSEL_API infsel_status infsel_indicator_total(const infsel_indicator* indicator, int64_t* out);

/* ---- inclusion-probability functionals ---------------------------------- */

/* Closed-form first-order inclusion probability where available;
 * INFSEL_ERR_UNSUPPORTED when the variant has none. is_limit is 1 when the
 * value is the large-N limit rather than the finite-N quantity. */
INFSEL_API infsel_status infsel_m_theoretical(const infsel_design* design,
                                              const infsel_model* model, double y, int64_t n_pop,
                                              double* value, int* is_limit);
/* JSON with fields m_hat, v_hat, mprime_12, mprime_21, c_hat, d_hat, se_*,
 * reps (pairwise fields are zero for the single-point estimator). */
INFSEL_API infsel_status infsel_m_monte_carlo_json(const infsel_design* design,
                                                   const infsel_model* model, double y,
                                                   int64_t n_pop, int64_t reps, uint64_t seed,
                                                   char** out_json);
INFSEL_API infsel_status infsel_pairwise_monte_carlo_json(const infsel_design* design,
                                                          const infsel_model* model, double y1,
                                                          double y2, int64_t n_pop, int64_t reps,
                                                          uint64_t seed, char** out_json);

/* ---- empirical and limit c.d.f.s ---------------------------------------- */

INFSEL_API infsel_status infsel_ecdf_build(const infsel_population* population,
                                           const infsel_indicator* indicator,
                                           infsel_step_cdf** out);
INFSEL_API void infsel_step_cdf_free(infsel_step_cdf* step);
INFSEL_API infsel_status infsel_ecdf_eval(const infsel_step_cdf* step, double alpha, double* out);
INFSEL_API infsel_status infsel_ecdf_is_empty(const infsel_step_cdf* step, int* out);
INFSEL_API infsel_status infsel_ecdf_quantile(const infsel_step_cdf* step, double p, double* out);

/* The design's built-in limit c.d.f.; INFSEL_ERR_NO_LIMIT for designs whose
 * sufficient conditions fail (cluster split, pathological Poisson). */
INFSEL_API infsel_status infsel_limit_cdf_builtin(const infsel_design* design,
                                                  const infsel_model* model,
                                                  infsel_limit_cdf** out);
INFSEL_API void infsel_limit_cdf_free(infsel_limit_cdf* limit);
INFSEL_API infsel_status infsel_limit_cdf_eval(const infsel_limit_cdf* limit, double alpha,
                                               double* out);
INFSEL_API infsel_status infsel_limit_quantile(const infsel_limit_cdf* limit, double p,
                                               double* out);

INFSEL_API infsel_status infsel_sup_distance_to_limit(const infsel_step_cdf* step,
                                                      const infsel_limit_cdf* limit, double* out);
INFSEL_API infsel_status infsel_sup_distance_to_model(const infsel_step_cdf* step,
                                                      const infsel_model* model, double* out);
INFSEL_API infsel_status infsel_quantile_sup_distance(const infsel_step_cdf* step,
                                                      const infsel_limit_cdf* limit, double k_lo,
                                                      double k_hi, int grid, double* out);

/* ---- embedding (coupling) ----------------------------------------------- */

INFSEL_API infsel_status infsel_coupling_build(const infsel_design* design,
                                               const infsel_population* population,
                                               const infsel_limit_cdf* limit,
                                               infsel_coupling** out);
INFSEL_API void infsel_coupling_free(infsel_coupling* coupling);
INFSEL_API infsel_status infsel_coupling_size(const infsel_coupling* coupling, int64_t* out);
INFSEL_API infsel_status infsel_coupling_draw(const infsel_coupling* coupling, double x,
                                              infsel_indicator** out);
/* CSV with header indicator,h,interval_lo,interval_hi. */
INFSEL_API infsel_status infsel_coupling_csv(const infsel_coupling* coupling, char** out_csv);
INFSEL_API infsel_status infsel_h_gamma(const infsel_population* population,
                                        const infsel_indicator* indicator,
                                        const infsel_limit_cdf* limit, double* out);

/* ---- condition helpers --------------------------------------------------- */

/* Chebyshev bound Var(n) / (E[n] - 1)^2; requires expected_n > 1. */
INFSEL_API infsel_status infsel_empty_sample_bound(double expected_n, double var_n, double* out);
/* Closed form and exhaustive enumeration of Cov(I_1, I_2) under SRSWOR. */
INFSEL_API infsel_status infsel_srswor_cov_identity(int64_t n_pop, int64_t n, double* closed_form,
                                                    double* enumerated);

/* ---- experiment runner --------------------------------------------------- */

/* Runs a full experiment from a JSON config (see the README for the schema).
 * mode_override / output_override may be NULL; seed_override applies when
 * has_seed_override is nonzero; threads <= 0 keeps the config's value. The
 * summary (JSON) is returned through out_summary_json when non-NULL. */
INFSEL_API infsel_status infsel_run_config_json(const char* config_json, const char* mode_override,
                                                const char* output_override, int has_seed_override,
                                                uint64_t seed_override, int threads,
                                                char** out_summary_json);
INFSEL_API infsel_status infsel_run_config_file(const char* path, const char* mode_override,
                                                const char* output_override, int has_seed_override,
                                                uint64_t seed_override, int threads,
                                                char** out_summary_json);

#ifdef __cplusplus
}
#endif

#endif /* INFSEL_H */
