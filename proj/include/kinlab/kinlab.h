/* C interface to the kinlab library. All handles are opaque; every call that
 * can fail returns a kl_status and leaves details in kl_last_error_message(),
 * which is per thread. Strings returned through char** must be released
 * with kl_free_string. State vectors are (x, v); 2x2 matrices are row-major. */
#ifndef KINLAB_KINLAB_H
#define KINLAB_KINLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KINLAB_BUILDING_LIBRARY)
#    define KL_API __declspec(dllexport)
#  else
#    define KL_API __declspec(dllimport)
#  endif
#else
#  define KL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kl_status {
  KL_OK = 0,
  KL_ERR_PARAMETER = 1,
  KL_ERR_UNSUPPORTED_REGIME = 2,
  KL_ERR_INTEGRATION = 3,
  KL_ERR_CANONICALIZATION = 4,
  KL_ERR_LOOKUP = 5,
  KL_ERR_PROPAGATION = 6,
  KL_ERR_DOMAIN = 7,
  KL_ERR_INPUT = 8,
  KL_ERR_LAW = 9,
  KL_ERR_NUMERIC = 10,
  KL_ERR_CONFIG = 11,
  KL_ERR_IO = 12,
  KL_ERR_NULL_ARGUMENT = 20,
  KL_ERR_INTERNAL = 21
} kl_status;

KL_API const char* kl_status_string(kl_status status);
KL_API const char* kl_last_error_message(void);
KL_API const char* kl_version(void);
KL_API void kl_free_string(char* s);

/* noise */

typedef struct kl_noise {
  double alpha; /* (1, 2]; 2 means standard Brownian motion */
  double a;     /* scale in psi(xi) = -a |xi|^alpha; must be 1/2 when alpha = 2 */
} kl_noise;

typedef struct kl_rng kl_rng;

KL_API kl_status kl_rng_create(uint64_t master_seed, uint64_t index, kl_rng** out);
KL_API void kl_rng_destroy(kl_rng* rng);

KL_API kl_status kl_standard_stable_sample(double alpha, kl_rng* rng, double* out);
KL_API kl_status kl_levy_increment(const kl_noise* noise, double dt, kl_rng* rng, double* out);
KL_API kl_status kl_noise_cf(const kl_noise* noise, double t, double xi, double* out);

/* rescale */

typedef enum kl_regime { KL_SUPER_CRITICAL = 0, KL_CRITICAL = 1, KL_SUB_CRITICAL = 2 } kl_regime;

typedef struct kl_regime_info {
  double alpha;
  double q;
  double rate_exponent;
  kl_regime regime;
} kl_regime_info;

KL_API kl_status kl_classify(double alpha, double beta, double gamma, kl_regime_info* out);
KL_API const char* kl_regime_name(kl_regime regime);
KL_API kl_status kl_regime_table(double alpha, double beta, double gamma, char** out);
KL_API kl_status kl_rotation(double t, double out[4]);
KL_API kl_status kl_rescale_y(const double z[2], double t, double eps, const kl_regime_info* info,
                              double t0, double out[2]);
KL_API kl_status kl_rescale_z(const double z[2], double eps, const kl_regime_info* info,
                              double out[2]);

/* simulation */

typedef struct kl_system_params {
  kl_noise noise;
  double beta;
  double gamma;
  double t0;
  double x0;
  double v0;
  int with_noise;
  int with_friction;
} kl_system_params;

/* Brownian noise, beta = 0, gamma = 1, t0 = 1, zero initial state. */
KL_API void kl_system_params_default(kl_system_params* out);

KL_API kl_status kl_drift_f(double t, double v, double beta, double gamma, double out[2]);
KL_API kl_status kl_step(const double state[2], double t, double dt, const kl_system_params* params,
                         kl_rng* rng, double out[2]);

typedef struct kl_ensemble kl_ensemble;

KL_API kl_status kl_simulate_ensemble(const kl_system_params* params, const double* obs_times,
                                      size_t n_times, double dt, size_t n_paths,
                                      uint64_t master_seed, unsigned threads, kl_ensemble** out);
KL_API size_t kl_ensemble_n_times(const kl_ensemble* ens);
KL_API size_t kl_ensemble_n_paths(const kl_ensemble* ens);
KL_API kl_status kl_ensemble_obs_time(const kl_ensemble* ens, size_t time_index, double* out);
KL_API kl_status kl_ensemble_sample(const kl_ensemble* ens, size_t time_index, size_t path,
                                    double out[2]);
KL_API kl_status kl_ensemble_moment(const kl_ensemble* ens, double kappa, size_t time_index,
                                    double* out);
KL_API kl_status kl_ensemble_write_csv(const kl_ensemble* ens, double eps, const char* path);
KL_API void kl_ensemble_destroy(kl_ensemble* ens);

/* damped oscillator ODE */

typedef struct kl_ode kl_ode;

KL_API kl_status kl_ode_integrate(double beta, double t0, double t_end, double tol, kl_ode** out);
KL_API kl_status kl_ode_wronskian_deviation(const kl_ode* ode, double* out);
KL_API kl_status kl_ode_canonicalize(const kl_ode* ode, double window_lo, double window_hi,
                                     double M[4], double* residual);
KL_API kl_status kl_ode_asymptotic_error(const kl_ode* ode, const double M[4], double t, double* out);
KL_API kl_status kl_ode_expansion_slope(const kl_ode* ode, const double M[4], double lo, double hi,
                                        double* out);
KL_API void kl_ode_destroy(kl_ode* ode);

/* limit laws */

KL_API kl_status kl_c_tilde(double alpha, double a, double* out);
KL_API kl_status kl_k_beta_alpha(double beta, double alpha, double* out);
KL_API kl_status kl_gaussian_kernel(kl_regime regime, double beta, double s, double t, double out[4]);
KL_API kl_status kl_stable_marginal_cf(kl_regime regime, double alpha, double beta, double c_tilde,
                                       double t, const double xi[2], double* out);
KL_API kl_status kl_stable_pair_cf(double alpha, double beta, double c_tilde, double s, double t,
                                   const double xi1[2], const double xi2[2], double* out);

/* checks */

typedef struct kl_oscillation_result {
  double empirical;
  double predicted;
  double grid_exact;
  double std_error;
} kl_oscillation_result;

KL_API kl_status kl_oscillation_check(double eps, double s, double t, size_t n_paths, double dt,
                                      uint64_t master_seed, unsigned threads,
                                      kl_oscillation_result* out);

/* experiments */

typedef struct kl_config kl_config;
typedef struct kl_report kl_report;

KL_API kl_status kl_config_load(const char* path, kl_config** out);
KL_API kl_status kl_config_parse(const char* ini_text, kl_config** out);
/* check: regime_marginal, regime_pair, corollary, moments, ode, averaging, oscillation */
KL_API kl_status kl_config_default(const char* check, kl_config** out);
/* key is "section.key", e.g. "run.master_seed" or "system.beta" */
KL_API kl_status kl_config_set(kl_config* config, const char* key, const char* value);
KL_API kl_status kl_config_validate(const kl_config* config);
KL_API kl_status kl_config_serialize(const kl_config* config, char** out);
KL_API void kl_config_destroy(kl_config* config);

KL_API kl_status kl_run(const kl_config* config, kl_report** out);
KL_API int kl_report_passed(const kl_report* report);
/* Owned by the report; valid until kl_report_destroy. */
KL_API const char* kl_report_json(const kl_report* report);
KL_API const char* kl_report_summary(const kl_report* report);
KL_API size_t kl_report_metric_count(const kl_report* report);
KL_API kl_status kl_report_metric(const kl_report* report, size_t index, const char** name,
                                  double* value, double* threshold, int* pass);
KL_API void kl_report_destroy(kl_report* report);

#ifdef __cplusplus
}
#endif

#endif
