#include "kinlab/kinlab.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "kinlab/error.hpp"
#include "kinlab/experiment.hpp"
#include "kinlab/kinetic_sim.hpp"
#include "kinlab/limits.hpp"
#include "kinlab/noise.hpp"
#include "kinlab/oscillator_ode.hpp"
#include "kinlab/rescale.hpp"
#include "kinlab/verify.hpp"

struct kl_rng {
  kinlab::RandomStream stream;
};

struct kl_ensemble {
  kinlab::MarginalEnsemble ens;
};

struct kl_ode {
  kinlab::OdeSolution sol;
};

struct kl_config {
  kinlab::ExperimentConfig config;
};

struct kl_report {
  kinlab::VerificationReport report;
  std::string json;
  std::string summary;
};

namespace {

thread_local std::string last_error;

template <class Fn>
kl_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return KL_OK;
  } catch (const kinlab::Error& e) {
    last_error = e.what();
    return static_cast<kl_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return KL_ERR_INTERNAL;
  }
}

template <class... Ptrs>
bool null_args(Ptrs... ptrs) {
  if (((ptrs == nullptr) || ...)) {
    last_error = "null argument";
    return true;
  }
  return false;
}

kinlab::NoiseSpec to_cpp(const kl_noise& n) { return {n.alpha, n.a}; }

kinlab::SystemParams to_cpp(const kl_system_params& p) {
  kinlab::SystemParams out;
  out.noise = to_cpp(p.noise);
  out.beta = p.beta;
  out.gamma = p.gamma;
  out.t0 = p.t0;
  out.x0 = p.x0;
  out.v0 = p.v0;
  out.with_noise = p.with_noise != 0;
  out.with_friction = p.with_friction != 0;
  return out;
}

kinlab::Regime to_cpp(kl_regime r) {
  switch (r) {
    case KL_SUPER_CRITICAL: return kinlab::Regime::super_critical;
    case KL_CRITICAL: return kinlab::Regime::critical;
    case KL_SUB_CRITICAL: return kinlab::Regime::sub_critical;
  }
  kinlab::fail(kinlab::ErrorCode::parameter, "unknown regime value");
}

kl_regime to_c(kinlab::Regime r) {
  switch (r) {
    case kinlab::Regime::super_critical: return KL_SUPER_CRITICAL;
    case kinlab::Regime::critical: return KL_CRITICAL;
    case kinlab::Regime::sub_critical: return KL_SUB_CRITICAL;
  }
  return KL_SUPER_CRITICAL;
}

kinlab::RegimeInfo to_cpp(const kl_regime_info& i) {
  return {i.alpha, i.q, i.rate_exponent, to_cpp(i.regime)};
}

kinlab::Mat2 mat_from(const double m[4]) {
  kinlab::Mat2 out;
  out << m[0], m[1], m[2], m[3];
  return out;
}

void mat_to(const kinlab::Mat2& m, double out[4]) {
  out[0] = m(0, 0);
  out[1] = m(0, 1);
  out[2] = m(1, 0);
  out[3] = m(1, 1);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* kl_status_string(kl_status status) {
  switch (status) {
    case KL_OK: return "ok";
    case KL_ERR_NULL_ARGUMENT: return "null argument";
    case KL_ERR_INTERNAL: return "internal error";
    default:
      if (status >= KL_ERR_PARAMETER && status <= KL_ERR_IO) {
        return kinlab::to_string(static_cast<kinlab::ErrorCode>(status)).data();
      }
      return "unknown status";
  }
}

const char* kl_last_error_message(void) { return last_error.c_str(); }

const char* kl_version(void) { return "0.1.0"; }

void kl_free_string(char* s) { std::free(s); }

kl_status kl_rng_create(uint64_t master_seed, uint64_t index, kl_rng** out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = new kl_rng{kinlab::RandomStream(master_seed, index)}; });
}

void kl_rng_destroy(kl_rng* rng) { delete rng; }

kl_status kl_standard_stable_sample(double alpha, kl_rng* rng, double* out) {
  if (null_args(rng, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::standard_stable_sample(alpha, rng->stream); });
}

kl_status kl_levy_increment(const kl_noise* noise, double dt, kl_rng* rng, double* out) {
  if (null_args(noise, rng, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::levy_increment(to_cpp(*noise), dt, rng->stream); });
}

kl_status kl_noise_cf(const kl_noise* noise, double t, double xi, double* out) {
  if (null_args(noise, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::noise_cf(to_cpp(*noise), t, xi); });
}

kl_status kl_classify(double alpha, double beta, double gamma, kl_regime_info* out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto info = kinlab::classify(alpha, beta, gamma);
    *out = {info.alpha, info.q, info.rate_exponent, to_c(info.regime)};
  });
}

const char* kl_regime_name(kl_regime regime) {
  switch (regime) {
    case KL_SUPER_CRITICAL: return "super_critical";
    case KL_CRITICAL: return "critical";
    case KL_SUB_CRITICAL: return "sub_critical";
  }
  return "unknown";
}

kl_status kl_regime_table(double alpha, double beta, double gamma, char** out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = dup_string(kinlab::regime_table(alpha, beta, gamma)); });
}

kl_status kl_rotation(double t, double out[4]) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { mat_to(kinlab::rotation(t), out); });
}

kl_status kl_rescale_y(const double z[2], double t, double eps, const kl_regime_info* info,
                       double t0, double out[2]) {
  if (null_args(z, info, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto y = kinlab::rescale_Y({z[0], z[1]}, t, eps, to_cpp(*info), t0);
    out[0] = y.x();
    out[1] = y.y();
  });
}

kl_status kl_rescale_z(const double z[2], double eps, const kl_regime_info* info, double out[2]) {
  if (null_args(z, info, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto y = kinlab::rescale_Z({z[0], z[1]}, eps, to_cpp(*info));
    out[0] = y.x();
    out[1] = y.y();
  });
}

void kl_system_params_default(kl_system_params* out) {
  if (out == nullptr) return;
  *out = {{2.0, 0.5}, 0.0, 1.0, 1.0, 0.0, 0.0, 1, 1};
}

kl_status kl_drift_f(double t, double v, double beta, double gamma, double out[2]) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto f = kinlab::drift_F(t, v, beta, gamma);
    out[0] = f.x();
    out[1] = f.y();
  });
}

kl_status kl_step(const double state[2], double t, double dt, const kl_system_params* params,
                  kl_rng* rng, double out[2]) {
  if (null_args(state, params, rng, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto z = kinlab::step({state[0], state[1]}, t, dt, to_cpp(*params), rng->stream);
    out[0] = z.x();
    out[1] = z.y();
  });
}

kl_status kl_simulate_ensemble(const kl_system_params* params, const double* obs_times,
                               size_t n_times, double dt, size_t n_paths, uint64_t master_seed,
                               unsigned threads, kl_ensemble** out) {
  if (null_args(params, obs_times, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    *out = new kl_ensemble{kinlab::simulate_ensemble(to_cpp(*params), {obs_times, n_times}, dt,
                                                     n_paths, master_seed, threads)};
  });
}

size_t kl_ensemble_n_times(const kl_ensemble* ens) { return ens ? ens->ens.obs_times.size() : 0; }

size_t kl_ensemble_n_paths(const kl_ensemble* ens) { return ens ? ens->ens.meta.n_paths : 0; }

kl_status kl_ensemble_obs_time(const kl_ensemble* ens, size_t time_index, double* out) {
  if (null_args(ens, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    kinlab::require(time_index < ens->ens.obs_times.size(), kinlab::ErrorCode::lookup,
                    "time index out of range");
    *out = ens->ens.obs_times[time_index];
  });
}

kl_status kl_ensemble_sample(const kl_ensemble* ens, size_t time_index, size_t path, double out[2]) {
  if (null_args(ens, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    kinlab::require(time_index < ens->ens.samples.size() && path < ens->ens.meta.n_paths,
                    kinlab::ErrorCode::lookup, "sample index out of range");
    const auto& z = ens->ens.samples[time_index][path];
    out[0] = z.x();
    out[1] = z.y();
  });
}

kl_status kl_ensemble_moment(const kl_ensemble* ens, double kappa, size_t time_index, double* out) {
  if (null_args(ens, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::empirical_moment(ens->ens, kappa, time_index); });
}

kl_status kl_ensemble_write_csv(const kl_ensemble* ens, double eps, const char* path) {
  if (null_args(ens, path)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    std::ofstream file(path);
    if (!file) kinlab::fail(kinlab::ErrorCode::io, std::string("cannot write ") + path);
    kinlab::write_samples_csv(ens->ens, eps, file);
    if (!file) kinlab::fail(kinlab::ErrorCode::io, std::string("failed writing ") + path);
  });
}

void kl_ensemble_destroy(kl_ensemble* ens) { delete ens; }

kl_status kl_ode_integrate(double beta, double t0, double t_end, double tol, kl_ode** out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = new kl_ode{kinlab::integrate_deframed(beta, t0, t_end, tol)}; });
}

kl_status kl_ode_wronskian_deviation(const kl_ode* ode, double* out) {
  if (null_args(ode, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::max_wronskian_deviation(ode->sol); });
}

kl_status kl_ode_canonicalize(const kl_ode* ode, double window_lo, double window_hi, double M[4],
                              double* residual) {
  if (null_args(ode, M)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto c = kinlab::canonicalize_basis(ode->sol, {window_lo, window_hi});
    mat_to(c.M, M);
    if (residual != nullptr) *residual = c.residual;
  });
}

kl_status kl_ode_asymptotic_error(const kl_ode* ode, const double M[4], double t, double* out) {
  if (null_args(ode, M, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::asymptotic_error(ode->sol, mat_from(M), t); });
}

kl_status kl_ode_expansion_slope(const kl_ode* ode, const double M[4], double lo, double hi,
                                 double* out) {
  if (null_args(ode, M, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::expansion_slope(ode->sol, mat_from(M), {lo, hi}); });
}

void kl_ode_destroy(kl_ode* ode) { delete ode; }

kl_status kl_c_tilde(double alpha, double a, double* out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::c_tilde(alpha, a); });
}

kl_status kl_k_beta_alpha(double beta, double alpha, double* out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = kinlab::k_beta_alpha(beta, alpha); });
}

kl_status kl_gaussian_kernel(kl_regime regime, double beta, double s, double t, double out[4]) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { mat_to(kinlab::gaussian_kernel(to_cpp(regime), beta, s, t), out); });
}

kl_status kl_stable_marginal_cf(kl_regime regime, double alpha, double beta, double c_tilde,
                                double t, const double xi[2], double* out) {
  if (null_args(xi, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    *out = kinlab::stable_marginal_cf(to_cpp(regime), alpha, beta, c_tilde, t, {xi[0], xi[1]});
  });
}

kl_status kl_stable_pair_cf(double alpha, double beta, double c_tilde, double s, double t,
                            const double xi1[2], const double xi2[2], double* out) {
  if (null_args(xi1, xi2, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    *out = kinlab::stable_pair_cf(alpha, beta, c_tilde, s, t, {xi1[0], xi1[1]}, {xi2[0], xi2[1]});
  });
}

kl_status kl_oscillation_check(double eps, double s, double t, size_t n_paths, double dt,
                               uint64_t master_seed, unsigned threads, kl_oscillation_result* out) {
  if (null_args(out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto r = kinlab::oscillation_check(eps, s, t, n_paths, dt, master_seed, 1.0, threads);
    *out = {r.empirical, r.predicted, r.grid_exact, r.std_error};
  });
}

kl_status kl_config_load(const char* path, kl_config** out) {
  if (null_args(path, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = new kl_config{kinlab::ExperimentConfig::load(path)}; });
}

kl_status kl_config_parse(const char* ini_text, kl_config** out) {
  if (null_args(ini_text, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = new kl_config{kinlab::ExperimentConfig::parse(ini_text)}; });
}

kl_status kl_config_default(const char* check, kl_config** out) {
  if (null_args(check, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = new kl_config{kinlab::default_config(kinlab::parse_check_kind(check))}; });
}

kl_status kl_config_set(kl_config* config, const char* key, const char* value) {
  if (null_args(config, key, value)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { config->config.set_field(key, value); });
}

kl_status kl_config_validate(const kl_config* config) {
  if (null_args(config)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { config->config.validate(); });
}

kl_status kl_config_serialize(const kl_config* config, char** out) {
  if (null_args(config, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = dup_string(config->config.serialize()); });
}

void kl_config_destroy(kl_config* config) { delete config; }

kl_status kl_run(const kl_config* config, kl_report** out) {
  if (null_args(config, out)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    auto* r = new kl_report{kinlab::run_experiment(config->config), {}, {}};
    r->json = r->report.to_json().dump(2);
    r->summary = r->report.summary();
    *out = r;
  });
}

int kl_report_passed(const kl_report* report) { return report != nullptr && report->report.passed(); }

const char* kl_report_json(const kl_report* report) { return report ? report->json.c_str() : ""; }

const char* kl_report_summary(const kl_report* report) { return report ? report->summary.c_str() : ""; }

size_t kl_report_metric_count(const kl_report* report) {
  return report ? report->report.metrics.size() : 0;
}

kl_status kl_report_metric(const kl_report* report, size_t index, const char** name, double* value,
                           double* threshold, int* pass) {
  if (null_args(report)) return KL_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto& ms = report->report.metrics;
    kinlab::require(index < ms.size(), kinlab::ErrorCode::lookup, "metric index out of range");
    if (name) *name = ms[index].name.c_str();
    if (value) *value = ms[index].value;
    if (threshold) *threshold = ms[index].threshold;
    if (pass) *pass = ms[index].pass ? 1 : 0;
  });
}

void kl_report_destroy(kl_report* report) { delete report; }

}  // extern "C"
