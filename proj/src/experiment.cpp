#include "kinlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kinlab/error.hpp"
#include "kinlab/limits.hpp"
#include "kinlab/oscillator_ode.hpp"
#include "kinlab/rescale.hpp"
#include "kinlab/stats.hpp"
#include "kinlab/verify.hpp"

namespace kinlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "kinlab 0.1.0";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (const double x : xs) out += (out.empty() ? "" : " ") + fmt(x);
  return out;
}

[[noreturn]] void config_error(const std::string& field, const std::string& reason) {
  fail(ErrorCode::config, "config field '" + field + "': " + reason);
}

double parse_double(const std::string& field, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    config_error(field, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_uint(const std::string& field, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    config_error(field, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  config_error(field, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  while (in >> token) out.push_back(parse_double(field, token));
  if (out.empty()) config_error(field, "expected at least one number");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// One INI key bound to a config field.
struct Binding {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

Binding real(std::string section, std::string key, double ExperimentConfig::*member) {
  const std::string field = section + "." + key;
  return {section, key, [=](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(field, v); },
          [=](const ExperimentConfig& c) { return fmt(c.*member); }};
}

template <class Get>
Binding real_at(std::string section, std::string key, Get get) {
  const std::string field = section + "." + key;
  return {section, key,
          [=](ExperimentConfig& c, const std::string& v) { get(c) = parse_double(field, v); },
          [=](const ExperimentConfig& c) { return fmt(get(const_cast<ExperimentConfig&>(c))); }};
}

template <class Get>
Binding list_at(std::string section, std::string key, Get get) {
  const std::string field = section + "." + key;
  return {section, key, [=](ExperimentConfig& c, const std::string& v) { get(c) = parse_list(field, v); },
          [=](const ExperimentConfig& c) { return fmt_list(get(const_cast<ExperimentConfig&>(c))); }};
}

template <class Get>
Binding interval_at(std::string section, std::string key, Get get) {
  const std::string field = section + "." + key;
  return {section, key,
          [=](ExperimentConfig& c, const std::string& v) {
            const auto xs = parse_list(field, v);
            if (xs.size() != 2) config_error(field, "expected two numbers 'lo hi'");
            get(c) = Interval{xs[0], xs[1]};
          },
          [=](const ExperimentConfig& c) {
            const Interval& i = get(const_cast<ExperimentConfig&>(c));
            return fmt(i.lo) + " " + fmt(i.hi);
          }};
}

template <class Get>
Binding flag_at(std::string section, std::string key, Get get) {
  const std::string field = section + "." + key;
  return {section, key, [=](ExperimentConfig& c, const std::string& v) { get(c) = parse_bool(field, v); },
          [=](const ExperimentConfig& c) {
            return std::string(get(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

const std::vector<Binding>& bindings() {
  using C = ExperimentConfig;
  static const std::vector<Binding> all = [] {
    std::vector<Binding> b;
    b.push_back({"experiment", "name", [](C& c, const std::string& v) { c.name = v; },
                 [](const C& c) { return c.name; }});
    b.push_back({"experiment", "check", [](C& c, const std::string& v) { c.check = parse_check_kind(v); },
                 [](const C& c) { return std::string(to_string(c.check)); }});
    b.push_back({"experiment", "output_dir", [](C& c, const std::string& v) { c.output_dir = v; },
                 [](const C& c) { return c.output_dir; }});
    b.push_back(real_at("noise", "alpha", [](C& c) -> double& { return c.params.noise.alpha; }));
    b.push_back(real_at("noise", "a", [](C& c) -> double& { return c.params.noise.a; }));
    b.push_back(real_at("system", "beta", [](C& c) -> double& { return c.params.beta; }));
    b.push_back(real_at("system", "gamma", [](C& c) -> double& { return c.params.gamma; }));
    b.push_back(real_at("system", "t0", [](C& c) -> double& { return c.params.t0; }));
    b.push_back(real_at("system", "x0", [](C& c) -> double& { return c.params.x0; }));
    b.push_back(real_at("system", "v0", [](C& c) -> double& { return c.params.v0; }));
    b.push_back(flag_at("system", "with_noise", [](C& c) -> bool& { return c.params.with_noise; }));
    b.push_back(flag_at("system", "with_friction", [](C& c) -> bool& { return c.params.with_friction; }));
    b.push_back(list_at("run", "eps_list", [](C& c) -> std::vector<double>& { return c.eps_list; }));
    b.push_back(list_at("run", "obs_times", [](C& c) -> std::vector<double>& { return c.obs_times; }));
    b.push_back({"run", "n_paths",
                 [](C& c, const std::string& v) { c.n_paths = parse_uint("run.n_paths", v); },
                 [](const C& c) { return std::to_string(c.n_paths); }});
    b.push_back(real("run", "dt", &C::dt));
    b.push_back({"run", "master_seed",
                 [](C& c, const std::string& v) { c.master_seed = parse_uint("run.master_seed", v); },
                 [](const C& c) { return std::to_string(c.master_seed); }});
    b.push_back({"run", "threads",
                 [](C& c, const std::string& v) {
                   const auto n = parse_uint("run.threads", v);
                   if (n > 4096) config_error("run.threads", "at most 4096");
                   c.threads = static_cast<unsigned>(n);
                 },
                 [](const C& c) { return std::to_string(c.threads); }});
#define KINLAB_REAL(field) \
  b.push_back(real_at("check", #field, [](C& c) -> double& { return c.settings.field; }))
    KINLAB_REAL(cov_tol);
    KINLAB_REAL(pair_tol);
    KINLAB_REAL(cf_tol);
    KINLAB_REAL(kappa);
    b.push_back(list_at("check", "moment_times",
                        [](C& c) -> std::vector<double>& { return c.settings.moment_times; }));
    KINLAB_REAL(slope_slack);
    KINLAB_REAL(ode_t_end);
    KINLAB_REAL(ode_tol);
    b.push_back(interval_at("check", "fit_window", [](C& c) -> Interval& { return c.settings.fit_window; }));
    b.push_back(interval_at("check", "slope_range", [](C& c) -> Interval& { return c.settings.slope_range; }));
    KINLAB_REAL(wronskian_tol);
    KINLAB_REAL(slope_tol);
    KINLAB_REAL(avg_t);
    KINLAB_REAL(avg_tol);
    KINLAB_REAL(asym_t);
    KINLAB_REAL(asym_tol);
    KINLAB_REAL(bound_max);
    KINLAB_REAL(osc_s);
    KINLAB_REAL(osc_t);
    KINLAB_REAL(osc_dt);
    KINLAB_REAL(osc_sigmas);
    KINLAB_REAL(osc_separation);
#undef KINLAB_REAL
    return b;
  }();
  return all;
}

bool simulation_check(CheckKind k) {
  return k == CheckKind::regime_marginal || k == CheckKind::regime_pair ||
         k == CheckKind::corollary || k == CheckKind::moments;
}

std::string eps_tag(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "eps=%g", eps);
  return buf;
}

std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "t=%g", t);
  return buf;
}

/// Writes sampled ensembles for the run: one CSV plus a JSON sidecar.
class SampleWriter {
public:
  explicit SampleWriter(const fs::path& dir)
      : csv_path_(dir / "samples.csv"), meta_path_(dir / "samples.meta.json"), csv_(csv_path_) {
    if (!csv_) fail(ErrorCode::io, "cannot write " + csv_path_.string());
  }

  void add(const MarginalEnsemble& ens, double eps) {
    write_samples_csv(ens, eps, csv_, first_);
    first_ = false;
    const auto& p = ens.meta.params;
    meta_.push_back({{"eps", eps},
                     {"obs_times", ens.obs_times},
                     {"requested_times", ens.meta.requested_times},
                     {"dt", ens.meta.dt},
                     {"master_seed", ens.meta.master_seed},
                     {"n_paths", ens.meta.n_paths},
                     {"params",
                      {{"alpha", p.noise.alpha}, {"a", p.noise.a}, {"beta", p.beta},
                       {"gamma", p.gamma}, {"t0", p.t0}, {"x0", p.x0}, {"v0", p.v0},
                       {"with_noise", p.with_noise}, {"with_friction", p.with_friction}}}});
  }

  void finish() {
    csv_.close();
    if (!csv_) fail(ErrorCode::io, "failed writing " + csv_path_.string());
    std::ofstream meta(meta_path_);
    meta << json{{"schema", "time,eps,traj,x,v"}, {"ensembles", meta_}}.dump(2) << '\n';
    if (!meta) fail(ErrorCode::io, "failed writing " + meta_path_.string());
  }

private:
  fs::path csv_path_;
  fs::path meta_path_;
  std::ofstream csv_;
  bool first_ = true;
  json meta_ = json::array();
};

struct RescaledRun {
  MarginalEnsemble raw;
  std::vector<std::vector<Vec2>> y;  ///< y[time][path]
};

/// Simulates Z at physical times obs/eps and applies the scaling (with or without deframing).
RescaledRun simulate_rescaled(const ExperimentConfig& cfg, double eps, std::uint64_t seed,
                              const std::vector<double>& times, bool deframe) {
  const RegimeInfo info = classify(cfg.params.noise.alpha, cfg.params.beta, cfg.params.gamma);
  std::vector<double> physical;
  for (const double t : times) physical.push_back(t / eps);
  RescaledRun run;
  run.raw = simulate_ensemble(cfg.params, physical, cfg.dt, cfg.n_paths, seed, cfg.threads);
  run.raw.meta.requested_times = physical;
  run.y.resize(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    // Deframe at the snapped grid time so the rotation matches the observed state.
    const double t_obs = run.raw.obs_times[j] * eps;
    for (const Vec2& z : run.raw.samples[j]) {
      run.y[j].push_back(deframe ? rescale_Y(z, t_obs, eps, info, cfg.params.t0)
                                 : rescale_Z(z, eps, info));
    }
  }
  return run;
}

std::vector<double> component(const std::vector<Vec2>& ys, int c) {
  std::vector<double> out;
  out.reserve(ys.size());
  for (const Vec2& y : ys) out.push_back(y[c]);
  return out;
}

void check_gaussian_marginal(VerificationReport& r, const std::string& prefix,
                             const std::vector<Vec2>& ys, const Mat2& K, double tol) {
  const Mat2 C = empirical_cov(ys);
  r.add_near(prefix + "/cov_xx", C(0, 0), K(0, 0), tol);
  r.add_near(prefix + "/cov_vv", C(1, 1), K(1, 1), tol);
  r.add_near(prefix + "/cov_xv", C(0, 1), K(0, 1), tol);
  const double crit = ks_critical_value(ys.size());
  for (int c = 0; c < 2; ++c) {
    const double sigma = std::sqrt(K(c, c));
    const double ks = ks_statistic(component(ys, c), [&](double x) { return normal_cdf(x, sigma); });
    r.add_upper(prefix + (c == 0 ? "/ks_x" : "/ks_v"), ks, crit);
  }
}

struct CfMeasure {
  double distance = 0.0;
  double sigma = 0.0;
};

CfMeasure cf_measure(const std::vector<Vec2>& ys, const std::function<double(const Vec2&)>& target,
                     double alpha) {
  const auto grid = standard_xi_grid(standard_xi_radius(alpha));
  const CfGrid emp = empirical_cf(ys, grid);
  return {cf_sup_distance(emp, target), emp.max_std_error()};
}

/// Headline per-eps distances; for every coarser eps, the finest distance may
/// not exceed it by more than one MC standard error.
void add_trend(VerificationReport& r, const std::vector<double>& eps, const std::vector<CfMeasure>& m,
               const std::string& what) {
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    const CfMeasure& fine = m.back();
    r.add_upper("trend/" + what + "/" + eps_tag(eps.back()) + "_vs_" + eps_tag(eps[i]),
                fine.distance - m[i].distance, fine.sigma);
  }
}

VerificationReport run_marginal(const ExperimentConfig& cfg, VerificationReport r, SampleWriter& out) {
  const LimitLaw law = make_limit_law(cfg.params.noise, cfg.params.beta, cfg.params.gamma);
  std::vector<CfMeasure> headline;
  json per_eps = json::array();
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double eps = cfg.eps_list[i];
    const bool finest = i + 1 == cfg.eps_list.size();
    const RescaledRun run = simulate_rescaled(cfg, eps, cfg.master_seed + i, cfg.obs_times, true);
    out.add(run.raw, eps);
    json entry{{"eps", eps}, {"seed", cfg.master_seed + i}};
    for (std::size_t j = 0; j < cfg.obs_times.size(); ++j) {
      const double t = cfg.obs_times[j];
      const CfMeasure m = cf_measure(run.y[j], [&](const Vec2& xi) { return law.cf(t, xi); }, law.alpha);
      entry["cf_sup_distance"][time_tag(t)] = m.distance;
      entry["cf_max_std_error"][time_tag(t)] = m.sigma;
      if (j == 0) headline.push_back(m);
      if (!finest) continue;
      const std::string prefix = eps_tag(eps) + "/" + time_tag(t);
      if (law.family == LawFamily::gaussian) {
        check_gaussian_marginal(r, prefix, run.y[j], law.kernel(t, t), cfg.settings.cov_tol);
      } else {
        r.add_upper(prefix + "/cf_sup_distance", m.distance, cfg.settings.cf_tol);
      }
    }
    per_eps.push_back(entry);
  }
  add_trend(r, cfg.eps_list, headline, "cf_sup_distance");
  r.meta["per_eps"] = per_eps;
  return r;
}

VerificationReport run_pair(const ExperimentConfig& cfg, VerificationReport r, SampleWriter& out) {
  const LimitLaw law = make_limit_law(cfg.params.noise, cfg.params.beta, cfg.params.gamma);
  const double s = cfg.obs_times[0];
  const double t = cfg.obs_times[1];
  const double radius = standard_xi_radius(law.alpha);
  const auto reduced = standard_xi_grid(radius, 8, 3);
  std::vector<CfMeasure> headline;
  json per_eps = json::array();
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double eps = cfg.eps_list[i];
    const bool finest = i + 1 == cfg.eps_list.size();
    const RescaledRun run = simulate_rescaled(cfg, eps, cfg.master_seed + i, cfg.obs_times, true);
    out.add(run.raw, eps);
    const auto& ys = run.y[0];
    const auto& yt = run.y[1];
    const PairCfGrid joint = empirical_pair_cf(ys, yt, reduced, reduced);
    const double pair_distance = pair_cf_sup_distance(joint, law, s, t);
    double pair_sigma = 0.0;
    for (const double e : joint.std_errors) pair_sigma = std::max(pair_sigma, e);
    headline.push_back({pair_distance, pair_sigma});
    json entry{{"eps", eps}, {"seed", cfg.master_seed + i}, {"pair_cf_sup_distance", pair_distance}};
    if (!finest) {
      per_eps.push_back(entry);
      continue;
    }
    const std::string prefix = eps_tag(eps);
    if (law.family == LawFamily::gaussian) {
      check_gaussian_marginal(r, prefix + "/" + time_tag(s), ys, law.kernel(s, s), cfg.settings.cov_tol);
      const Mat2 X = empirical_cross_cov(ys, yt);
      const Mat2 K = law.kernel(s, t);
      const std::string pp = prefix + "/cross_" + time_tag(s) + "_" + time_tag(t);
      r.add_near(pp + "/xx", X(0, 0), K(0, 0), cfg.settings.pair_tol);
      r.add_near(pp + "/vv", X(1, 1), K(1, 1), cfg.settings.pair_tol);
      r.add_near(pp + "/xv", X(0, 1), K(0, 1), cfg.settings.pair_tol);
      r.add_near(pp + "/vx", X(1, 0), K(1, 0), cfg.settings.pair_tol);
    } else {
      const CfMeasure m = cf_measure(ys, [&](const Vec2& xi) { return law.cf(s, xi); }, law.alpha);
      r.add_upper(prefix + "/" + time_tag(s) + "/cf_sup_distance", m.distance, cfg.settings.cf_tol);
      if (law.regime.regime == Regime::sub_critical) {
        r.add_upper(prefix + "/pair_factorization_gap", pair_factorization_gap(ys, yt, reduced, reduced),
                    cfg.settings.pair_tol);
      } else {
        r.add_upper(prefix + "/pair_cf_sup_distance", pair_distance, cfg.settings.pair_tol);
      }
    }
    per_eps.push_back(entry);
  }
  add_trend(r, cfg.eps_list, headline, "pair_cf_sup_distance");
  r.meta["per_eps"] = per_eps;
  return r;
}

VerificationReport run_corollary(const ExperimentConfig& cfg, VerificationReport r, SampleWriter& out) {
  const LimitLaw law = make_limit_law(cfg.params.noise, cfg.params.beta, cfg.params.gamma);
  const auto target = corollary_cf(law.regime.regime, cfg.params.noise);
  std::vector<CfMeasure> headline;
  json per_eps = json::array();
  const std::vector<double> unit{1.0};
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double eps = cfg.eps_list[i];
    const RescaledRun run = simulate_rescaled(cfg, eps, cfg.master_seed + i, unit, false);
    out.add(run.raw, eps);
    const CfMeasure m = cf_measure(run.y[0], target, law.alpha);
    headline.push_back(m);
    per_eps.push_back({{"eps", eps}, {"seed", cfg.master_seed + i}, {"cf_sup_distance", m.distance}});
    if (i + 1 < cfg.eps_list.size()) continue;
    const std::string prefix = eps_tag(eps) + "/T=1/eps";
    if (law.family == LawFamily::gaussian) {
      check_gaussian_marginal(r, prefix, run.y[0], law.kernel(1.0, 1.0), cfg.settings.cov_tol);
    } else {
      r.add_upper(prefix + "/cf_sup_distance", m.distance, cfg.settings.cf_tol);
    }
  }
  add_trend(r, cfg.eps_list, headline, "cf_sup_distance");
  r.meta["per_eps"] = per_eps;
  return r;
}

VerificationReport run_moments(const ExperimentConfig& cfg, VerificationReport r, SampleWriter& out) {
  const auto& times = cfg.settings.moment_times;
  const MarginalEnsemble ens =
      simulate_ensemble(cfg.params, times, cfg.dt, cfg.n_paths, cfg.master_seed, cfg.threads);
  out.add(ens, 1.0);
  std::vector<double> moments;
  for (std::size_t j = 0; j < times.size(); ++j) moments.push_back(empirical_moment(ens, cfg.settings.kappa, j));
  const double slope = loglog_slope(ens.obs_times, moments);
  const double bound = cfg.settings.kappa / cfg.params.noise.alpha;
  r.add_upper("moment_loglog_slope/kappa=" + fmt(cfg.settings.kappa), slope, bound + cfg.settings.slope_slack);
  r.meta["moments"] = {{"times", ens.obs_times}, {"values", moments}, {"exponent_bound", bound}};
  return r;
}

VerificationReport run_ode(const ExperimentConfig& cfg, VerificationReport r) {
  const double beta = cfg.params.beta;
  const auto& s = cfg.settings;
  const OdeSolution sol = integrate_deframed(beta, cfg.params.t0, s.ode_t_end, s.ode_tol);
  const Canonicalization canon = canonicalize_basis(sol, s.fit_window);
  const double slope = expansion_slope(sol, canon.M, s.slope_range);
  const double target = -std::min(2 * beta - 1, beta);
  r.add_upper("wronskian_max_deviation", max_wronskian_deviation(sol), s.wronskian_tol);
  r.add_near("expansion_error_slope", slope, target, s.slope_tol);
  r.meta["ode"] = {{"beta", beta},
                   {"canonicalization_residual", canon.residual},
                   {"grid_points", sol.times.size()},
                   {"asymptotic_error_at_end", asymptotic_error(sol, canon.M, sol.times.back())}};
  return r;
}

VerificationReport run_averaging(const ExperimentConfig& cfg, VerificationReport r) {
  const auto& s = cfg.settings;
  const double alpha = cfg.params.noise.alpha;
  const std::vector<std::pair<std::string, GFunction>> gs{
      {"t^0.5", GFunction::power(0.5)},
      {"t^2", GFunction::power(2.0)},
      {"exp(t^0.25)", GFunction::stretched_exp(1.0, 0.75)}};
  const std::vector<std::pair<std::string, PeriodicH>> hs{
      {"cos^2", {PeriodicH::Kind::cos2}},
      {"sin^2", {PeriodicH::Kind::sin2}},
      {"sin*cos", {PeriodicH::Kind::sin_cos}},
      {"|cos|^" + fmt(alpha), {PeriodicH::Kind::abs_cos_pow, alpha}}};
  const std::vector<double> at{s.avg_t};
  for (const auto& [gname, g] : gs) {
    for (const auto& [hname, h] : hs) {
      const double ratio = averaging_check(g, h, at, cfg.params.t0).front();
      const double expected = h.mean() == 0.0 ? 0.0 : 1.0;
      r.add_near("averaging/g=" + gname + "/h=" + hname, ratio, expected, s.avg_tol);
    }
  }

  const double beta = cfg.params.beta;
  if (beta > 0.5 && beta <= 1.0) {
    const IntegralAsymptotics ia = integral_asymptotic_check(beta, alpha, cfg.eps_list, s.asym_t, cfg.params.t0);
    const std::string tag = "integral_asymptotics/beta=" + fmt(beta) + "/alpha=" + fmt(alpha);
    r.add_near(tag + "/ratio/" + eps_tag(cfg.eps_list.back()), ia.ratios.back(), 1.0, s.asym_tol);
    r.add_upper(tag + "/boundedness_max", *std::max_element(ia.boundedness.begin(), ia.boundedness.end()),
                s.bound_max);
    r.meta["integral_asymptotics"] = {{"eps", cfg.eps_list}, {"ratios", ia.ratios},
                                      {"boundedness", ia.boundedness}, {"t", s.asym_t}};
  } else {
    r.meta["integral_asymptotics"] = "skipped: needs beta in (1/2, 1]";
  }
  return r;
}

VerificationReport run_oscillation(const ExperimentConfig& cfg, VerificationReport r) {
  const auto& s = cfg.settings;
  std::vector<OscillationResult> results;
  json per_eps = json::array();
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double eps = cfg.eps_list[i];
    const OscillationResult o = oscillation_check(eps, s.osc_s, s.osc_t, cfg.n_paths, s.osc_dt,
                                                  cfg.master_seed + i, cfg.params.t0, cfg.threads);
    results.push_back(o);
    const std::string prefix = eps_tag(eps);
    r.add_upper(prefix + "/sigmas_from_predicted", std::abs(o.empirical - o.predicted) / o.std_error,
                s.osc_sigmas);
    r.add_upper(prefix + "/sigmas_from_grid_exact", std::abs(o.empirical - o.grid_exact) / o.std_error,
                s.osc_sigmas);
    per_eps.push_back({{"eps", eps}, {"seed", cfg.master_seed + i}, {"empirical", o.empirical},
                       {"predicted", o.predicted}, {"grid_exact", o.grid_exact},
                       {"std_error", o.std_error}});
  }
  for (std::size_t i = 0; i + 1 < results.size(); ++i) {
    const double sigma = std::max(results[i].std_error, results[i + 1].std_error);
    r.add_lower("separation/" + eps_tag(cfg.eps_list[i]) + "_vs_" + eps_tag(cfg.eps_list[i + 1]),
                std::abs(results[i].predicted - results[i + 1].predicted) / sigma, s.osc_separation);
  }
  r.meta["per_eps"] = per_eps;
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

}  // namespace

std::string_view to_string(CheckKind kind) noexcept {
  switch (kind) {
    case CheckKind::regime_marginal: return "regime_marginal";
    case CheckKind::regime_pair: return "regime_pair";
    case CheckKind::corollary: return "corollary";
    case CheckKind::moments: return "moments";
    case CheckKind::ode: return "ode";
    case CheckKind::averaging: return "averaging";
    case CheckKind::oscillation: return "oscillation";
  }
  return "unknown";
}

CheckKind parse_check_kind(std::string_view text) {
  for (const CheckKind k : {CheckKind::regime_marginal, CheckKind::regime_pair, CheckKind::corollary,
                            CheckKind::moments, CheckKind::ode, CheckKind::averaging, CheckKind::oscillation}) {
    if (to_string(k) == text) return k;
  }
  config_error("experiment.check", "unknown check '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (name.empty() || name.find_first_of(",\n\r") != std::string::npos) {
    config_error("experiment.name", "must be non-empty without commas or newlines");
  }
  if (output_dir.empty()) config_error("experiment.output_dir", "must be non-empty");
  const NoiseSpec& noise = params.noise;
  if (!(noise.alpha > 1.0 && noise.alpha <= 2.0)) config_error("noise.alpha", "must lie in (1, 2]");
  if (!(noise.a > 0.0)) config_error("noise.a", "must be positive");
  if (noise.alpha == 2.0 && noise.a != 0.5) {
    config_error("noise.a", "Brownian noise (alpha = 2) fixes a = 0.5");
  }
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) config_error("system.beta", "must be >= 0");
  if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma)) config_error("system.gamma", "must be >= 0");
  if (!(params.t0 > 0.0) || !std::isfinite(params.t0)) config_error("system.t0", "must be positive");
  if (!std::isfinite(params.x0)) config_error("system.x0", "must be finite");
  if (!std::isfinite(params.v0)) config_error("system.v0", "must be finite");

  if (eps_list.empty()) config_error("run.eps_list", "must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) config_error("run.eps_list", "entries must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) config_error("run.eps_list", "must be strictly decreasing");
  }
  if (obs_times.empty()) config_error("run.obs_times", "must not be empty");
  for (std::size_t i = 0; i < obs_times.size(); ++i) {
    if (!(obs_times[i] > 0.0) || !std::isfinite(obs_times[i])) config_error("run.obs_times", "entries must be positive");
    if (i > 0 && !(obs_times[i] > obs_times[i - 1])) config_error("run.obs_times", "must be increasing");
  }
  if (n_paths < 1) config_error("run.n_paths", "must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) config_error("run.dt", "must be positive");

  const auto& s = settings;
  for (const auto& [field, v] : std::initializer_list<std::pair<const char*, double>>{
           {"check.cov_tol", s.cov_tol}, {"check.pair_tol", s.pair_tol}, {"check.cf_tol", s.cf_tol},
           {"check.slope_slack", s.slope_slack}, {"check.ode_tol", s.ode_tol},
           {"check.wronskian_tol", s.wronskian_tol}, {"check.slope_tol", s.slope_tol},
           {"check.avg_t", s.avg_t}, {"check.avg_tol", s.avg_tol}, {"check.asym_t", s.asym_t},
           {"check.asym_tol", s.asym_tol}, {"check.bound_max", s.bound_max},
           {"check.osc_dt", s.osc_dt}, {"check.osc_sigmas", s.osc_sigmas},
           {"check.osc_separation", s.osc_separation}}) {
    if (!(v > 0.0) || !std::isfinite(v)) config_error(field, "must be positive");
  }

  switch (check) {
    case CheckKind::regime_marginal:
    case CheckKind::regime_pair:
    case CheckKind::corollary: {
      if (n_paths < 2) config_error("run.n_paths", "covariance and CF checks need at least 2 paths");
      if (check == CheckKind::regime_pair && obs_times.size() != 2) {
        config_error("run.obs_times", "regime_pair needs exactly two times s < t");
      }
      const std::vector<double> times = check == CheckKind::corollary ? std::vector<double>{1.0} : obs_times;
      for (const double eps : eps_list) {
        for (const double t : times) {
          if (t / eps - params.t0 < dt) {
            config_error("run.eps_list", "t/eps must exceed t0 by at least one step for t = " + fmt(t) +
                                             ", eps = " + fmt(eps));
          }
        }
      }
      if (!noise.is_brownian() && !(params.gamma > 0.0 && params.gamma < noise.alpha)) {
        config_error("system.gamma", "stable limits need gamma in (0, alpha)");
      }
      const Regime regime = classify(noise.alpha, params.beta, params.gamma).regime;
      if (regime != Regime::super_critical &&
          !(params.gamma == 1.0 && params.beta > 0.5 && params.beta <= 1.0)) {
        config_error("system.beta", "critical and sub-critical limits need gamma = 1 and beta in (1/2, 1]");
      }
      break;
    }
    case CheckKind::moments:
      if (!(s.kappa >= 0.0)) config_error("check.kappa", "must be >= 0");
      if (!noise.is_brownian() && s.kappa >= noise.alpha) {
        config_error("check.kappa", "moments of order >= alpha are infinite for stable noise");
      }
      if (s.moment_times.size() < 2) config_error("check.moment_times", "needs at least two times");
      for (std::size_t i = 0; i < s.moment_times.size(); ++i) {
        if (!(s.moment_times[i] - params.t0 >= dt) || (i > 0 && !(s.moment_times[i] > s.moment_times[i - 1]))) {
          config_error("check.moment_times", "must be increasing and above t0 + dt");
        }
      }
      break;
    case CheckKind::ode:
      if (!(params.beta > 0.5)) config_error("system.beta", "the ODE expansion needs beta > 1/2");
      if (!(s.ode_t_end > params.t0)) config_error("check.ode_t_end", "must exceed t0");
      if (!(s.fit_window.lo < s.fit_window.hi && s.fit_window.hi <= s.ode_t_end)) {
        config_error("check.fit_window", "must be an interval inside [t0, ode_t_end]");
      }
      if (!(s.slope_range.lo >= params.t0 && s.slope_range.lo < s.slope_range.hi &&
            s.slope_range.hi <= s.ode_t_end)) {
        config_error("check.slope_range", "must be an interval inside [t0, ode_t_end]");
      }
      break;
    case CheckKind::averaging:
      if (!(s.avg_t > params.t0)) config_error("check.avg_t", "must exceed t0");
      for (const double eps : eps_list) {
        if (!(s.asym_t / eps > params.t0)) config_error("run.eps_list", "asym_t/eps must exceed t0");
      }
      break;
    case CheckKind::oscillation:
      if (n_paths < 2) config_error("run.n_paths", "needs at least 2 paths");
      if (!(s.osc_s < s.osc_t)) config_error("check.osc_t", "must exceed osc_s");
      for (const double eps : eps_list) {
        if (!(s.osc_s / eps > params.t0)) config_error("check.osc_s", "osc_s/eps must exceed t0");
      }
      break;
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view ini_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::config, std::string("malformed config: ") + e.what());
  }
  std::map<std::string, const Binding*> known;
  std::set<std::string> sections;
  for (const Binding& b : bindings()) {
    known[b.section + "." + b.key] = &b;
    sections.insert(b.section);
  }
  // read_ini silently drops empty sections, so headers are checked on the raw text.
  std::istringstream lines{std::string(ini_text)};
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (!sections.count(name)) fail(ErrorCode::config, "unknown config section [" + name + "]");
    }
  }
  ExperimentConfig config;
  for (const auto& [section, keys] : tree) {
    if (!sections.count(section)) {
      fail(ErrorCode::config, "unknown config section [" + section + "]");
    }
    if (keys.empty() && !keys.data().empty()) {
      fail(ErrorCode::config, "config key '" + section + "' must live in a section");
    }
    for (const auto& [key, value] : keys) {
      const auto it = known.find(section + "." + key);
      if (it == known.end()) fail(ErrorCode::config, "unknown config field '" + section + "." + key + "'");
      it->second->read(config, trim(value.data()));
    }
  }
  return config;
}

void ExperimentConfig::set_field(std::string_view dotted_key, const std::string& value) {
  for (const Binding& b : bindings()) {
    if (b.section + "." + b.key == dotted_key) {
      b.read(*this, trim(value));
      return;
    }
  }
  fail(ErrorCode::config, "unknown config field '" + std::string(dotted_key) + "'");
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  std::string section;
  for (const Binding& b : bindings()) {
    if (b.section != section) {
      out += (section.empty() ? "[" : "\n[") + b.section + "]\n";
      section = b.section;
    }
    out += b.key + " = " + b.write(*this) + "\n";
  }
  return out;
}

nlohmann::json ExperimentConfig::to_json() const {
  json j = json::object();
  for (const Binding& b : bindings()) j[b.section][b.key] = b.write(*this);
  return j;
}

ExperimentConfig default_config(CheckKind kind) {
  ExperimentConfig c;
  c.check = kind;
  c.name = std::string(to_string(kind));
  switch (kind) {
    case CheckKind::regime_pair:
      c.obs_times = {1.0, 2.0};
      break;
    case CheckKind::moments:
      c.n_paths = 2000;
      break;
    case CheckKind::ode:
      c.params.beta = 0.75;
      break;
    case CheckKind::averaging:
      c.params.beta = 1.0;
      c.eps_list = {1e-1, 1e-2, 1e-3};
      break;
    case CheckKind::oscillation:
      c.eps_list = {1e-2, 5e-3};
      c.n_paths = 100000;
      break;
    default:
      break;
  }
  return c;
}

VerificationReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::io, "cannot create output directory " + dir.string());

  VerificationReport report;
  report.experiment = config.name;
  report.regime = std::string(to_string(classify(config.params.noise.alpha, config.params.beta,
                                                 config.params.gamma).regime));
  report.meta = {{"version", kVersion},
                 {"check", to_string(config.check)},
                 {"config", config.to_json()},
                 {"config_ini", config.serialize()}};

  if (simulation_check(config.check)) {
    SampleWriter writer(dir);
    switch (config.check) {
      case CheckKind::regime_marginal: report = run_marginal(config, std::move(report), writer); break;
      case CheckKind::regime_pair: report = run_pair(config, std::move(report), writer); break;
      case CheckKind::corollary: report = run_corollary(config, std::move(report), writer); break;
      default: report = run_moments(config, std::move(report), writer); break;
    }
    writer.finish();
  } else if (config.check == CheckKind::ode) {
    report = run_ode(config, std::move(report));
  } else if (config.check == CheckKind::averaging) {
    report = run_averaging(config, std::move(report));
  } else {
    report = run_oscillation(config, std::move(report));
  }

  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "summary.txt", report.summary());
  report.append_metrics_csv((dir / "metrics.csv").string());
  return report;
}

std::string regime_table(double alpha, double beta, double gamma) {
  const RegimeInfo info = classify(alpha, beta, gamma);
  const bool brownian = info.brownian();
  std::ostringstream out;
  out << "alpha          " << fmt(alpha) << (brownian ? "  (Brownian)\n" : "  (symmetric stable)\n");
  out << "beta           " << fmt(beta) << "\n";
  out << "gamma          " << fmt(gamma) << "\n";
  out << "q              " << fmt(info.q) << (brownian ? "  = beta/(gamma+1)\n" : "  = beta/(gamma+alpha-1)\n");
  out << "alpha*q        " << fmt(alpha * info.q) << "\n";
  out << "rate exponent  " << fmt(info.rate_exponent) << "  (Y scaled by eps^" << fmt(info.rate_exponent) << ")\n";
  out << "regime         " << to_string(info.regime) << "\n";
  const bool linear_hyp = gamma == 1.0 && beta > 0.5 && beta <= 1.0;
  std::string limit;
  switch (info.regime) {
    case Regime::super_critical:
      limit = brownian ? "Brownian motion B_{t/2} (friction negligible)"
                       : "rotation-invariant stable Levy process, CF exp(-C t ||xi||^alpha)";
      break;
    case Regime::critical:
      limit = brownian ? "Gaussian, kernel (s^t)^2/(4 sqrt(st)) I"
                       : "(1/sqrt t) int_0^t sqrt(s) dL_s, CF exp(-C t ||xi||^alpha/(1+alpha/2))";
      break;
    case Regime::sub_critical:
      limit = brownian ? "Gaussian white noise in time, kernel s^beta/2 1{s=t} I"
                       : "independent in time, CF exp(-(2/alpha) C t^beta ||xi||^alpha)";
      break;
  }
  out << "limit          " << limit << "\n";
  if (!brownian) {
    out << "gamma in (0,alpha)  " << (gamma > 0.0 && gamma < alpha ? "yes" : "no (stable limit not covered)")
        << "\n";
  }
  if (info.regime != Regime::super_critical) {
    out << "gamma=1, beta in (1/2,1]  " << (linear_hyp ? "yes" : "no (limit not covered)") << "\n";
  }
  out << "state order    (X, V)\n";
  return out.str();
}

}  // namespace kinlab
