// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
// Tolerances and seeds are fixed here; the exit code is non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "kinlab/error.hpp"
#include "kinlab/experiment.hpp"
#include "kinlab/limits.hpp"
#include "kinlab/verify.hpp"
#include "support/oracles.hpp"

using namespace kinlab;
namespace fs = std::filesystem;

namespace {

fs::path g_out;

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void note(const std::string& line) { lines.push_back(line); }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

bool matches_any(const std::string& name, const std::vector<std::string>& needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](const std::string& n) { return name.find(n) != std::string::npos; });
}

/// Runs one config. Metrics whose names contain an `ignore` substring are
/// listed as diagnostics and do not enter the verdict.
void run_into(Verdict& v, ExperimentConfig cfg, const std::string& dir,
              const std::vector<std::string>& ignore = {}) {
  cfg.output_dir = (g_out / dir).string();
  try {
    const VerificationReport r = run_experiment(cfg);
    for (const Metric& m : r.metrics) {
      const bool counted = !matches_any(m.name, ignore);
      if (counted && !m.pass) v.pass = false;
      std::string line = (counted ? (m.pass ? "ok    " : "FAIL  ") : "diag  ") + m.name + " = " +
                         fmt("%.4g", m.value);
      if (m.target) line += " (target " + fmt("%.4g", *m.target) + ", tol " + fmt("%.3g", m.threshold) + ")";
      else line += " (" + m.relation + " " + fmt("%.4g", m.threshold) + ")";
      v.note(line);
    }
  } catch (const Error& e) {
    v.pass = false;
    v.note(std::string("error: ") + e.what());
  }
}

void emit(int id, const std::string& title, const Verdict& v, double seconds) {
  std::printf("criterion %2d: %s  %s  [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", title.c_str(), seconds);
  for (const auto& l : v.lines) std::printf("      %s\n", l.c_str());
  std::fflush(stdout);
}

ExperimentConfig base(CheckKind kind, const std::string& name, std::uint64_t seed) {
  ExperimentConfig c = default_config(kind);
  c.name = name;
  c.master_seed = seed;
  c.threads = 0;
  c.dt = 2e-2;
  return c;
}

// Exact finite-eps law of the simulated Y for gamma = 1 (the scheme is linear).
oracle::LinearOracle linear_oracle(double alpha, double a, double beta, double eps) {
  const RegimeInfo info = classify(alpha, beta, 1.0);
  oracle::LinearOracle o;
  o.dt = 2e-2;
  o.t0 = 1.0;
  o.beta = beta;
  o.eps = eps;
  o.rate = info.rate_exponent;
  o.alpha = alpha;
  o.a = a;
  return o;
}

double exponent(const std::vector<Eigen::Vector2d>& c, const Vec2& xi, double alpha, double a, double dt) {
  double s = 0.0;
  for (const auto& v : c) s += std::pow(std::abs(xi.dot(v)), alpha);
  return a * dt * s;
}

double exact_cf_distance(const oracle::LinearOracle& o, const LimitLaw& law, double t) {
  const auto c = o.y_coefficients(t);
  double sup = 0.0;
  for (const Vec2& xi : standard_xi_grid(standard_xi_radius(o.alpha))) {
    sup = std::max(sup, std::abs(std::exp(-exponent(c, xi, o.alpha, o.a, o.dt)) - law.cf(t, xi)));
  }
  return sup;
}

std::string cov_info(const oracle::LinearOracle& o, double s, double t) {
  const Eigen::Matrix2d k = o.cross_cov(s, t);
  return "info  exact finite-eps E[Y_" + fmt("%g", s) + " Y_" + fmt("%g", t) + "^T] = [[" +
         fmt("%.4f", k(0, 0)) + ", " + fmt("%.4f", k(0, 1)) + "], [" + fmt("%.4f", k(1, 0)) + ", " +
         fmt("%.4f", k(1, 1)) + "]]";
}

template <class F>
void timed(int id, const std::string& title, F body, bool& all) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  body(v);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(id, title, v, secs);
  all = all && v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  g_out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(g_out);
  bool all = true;

  timed(1, "Brownian super-critical (beta=2): cov of Y_1 = I/2 +-0.03, KS at 1%", [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_marginal, "c1_brownian_super", 101);
    c.params.beta = 2.0;
    c.n_paths = 20000;
    c.eps_list = {1e-2};
    c.obs_times = {1.0};
    c.settings.cov_tol = 0.03;
    run_into(v, c, "c1");
    v.note(cov_info(linear_oracle(2.0, 0.5, 2.0, 1e-2), 1.0, 1.0));
  }, all);

  timed(2, "Brownian critical (beta=1): var Y_1 = 0.25 +-0.03, cross(1,2) = 0.1768 I +-0.04", [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_pair, "c2_brownian_critical", 102);
    c.params.beta = 1.0;
    c.n_paths = 20000;
    c.eps_list = {1e-2};
    c.obs_times = {1.0, 2.0};
    c.settings.cov_tol = 0.03;
    c.settings.pair_tol = 0.04;
    run_into(v, c, "c2", {"/ks_", "trend/"});
    const auto o = linear_oracle(2.0, 0.5, 1.0, 1e-2);
    v.note(cov_info(o, 1.0, 1.0));
    v.note(cov_info(o, 1.0, 2.0));
  }, all);

  timed(3, "Brownian sub-critical (beta=0.75): var Y_1 = 0.5 +-0.04, cross(1,2) = 0 +-0.04", [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_pair, "c3_brownian_sub", 103);
    c.params.beta = 0.75;
    c.n_paths = 20000;
    c.eps_list = {1e-2};
    c.obs_times = {1.0, 2.0};
    c.settings.cov_tol = 0.04;
    c.settings.pair_tol = 0.04;
    run_into(v, c, "c3", {"/ks_", "trend/"});
    const auto o = linear_oracle(2.0, 0.5, 0.75, 1e-2);
    v.note(cov_info(o, 1.0, 1.0));
    v.note(cov_info(o, 1.0, 2.0));
  }, all);

  timed(4, "stable super-critical (alpha=beta=1.5): CF distance <= 0.05 at eps=0.01, trend vs eps=0.02",
        [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_marginal, "c4_stable_super", 104);
    c.params.noise = NoiseSpec::stable(1.5, 1.0);
    c.params.beta = 1.5;
    c.n_paths = 50000;
    c.eps_list = {2e-2, 1e-2};
    c.obs_times = {1.0};
    c.settings.cf_tol = 0.05;
    run_into(v, c, "c4");
    const LimitLaw law = make_limit_law(c.params.noise, 1.5, 1.0);
    for (const double eps : c.eps_list) {
      v.note("info  exact finite-eps CF distance at eps=" + fmt("%g", eps) + ": " +
             fmt("%.4f", exact_cf_distance(linear_oracle(1.5, 1.0, 1.5, eps), law, 1.0)));
    }
  }, all);

  timed(5, "stable critical (alpha=1.5, beta=1): CF distance to exp(-C|xi|^a/(1+a/2)) <= 0.05", [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_marginal, "c5_stable_critical", 105);
    c.params.noise = NoiseSpec::stable(1.5, 1.0);
    c.params.beta = 1.0;
    c.n_paths = 50000;
    c.eps_list = {1e-2};
    c.obs_times = {1.0};
    c.settings.cf_tol = 0.05;
    run_into(v, c, "c5");
    const LimitLaw law = make_limit_law(c.params.noise, 1.0, 1.0);
    v.note("info  exact finite-eps CF distance: " +
           fmt("%.4f", exact_cf_distance(linear_oracle(1.5, 1.0, 1.0, 1e-2), law, 1.0)));
  }, all);

  timed(6, "stable sub-critical (alpha=1.5, beta=0.8): CF distance <= 0.05, pair factorization gap <= 0.06",
        [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::regime_pair, "c6_stable_sub", 106);
    c.params.noise = NoiseSpec::stable(1.5, 1.0);
    c.params.beta = 0.8;
    c.n_paths = 20000;
    c.eps_list = {1e-2};
    c.obs_times = {1.0, 2.0};
    c.settings.cf_tol = 0.05;
    c.settings.pair_tol = 0.06;
    run_into(v, c, "c6", {"trend/"});
    const auto o = linear_oracle(1.5, 1.0, 0.8, 1e-2);
    const LimitLaw law = make_limit_law(c.params.noise, 0.8, 1.0);
    v.note("info  exact finite-eps CF distance at t=1: " + fmt("%.4f", exact_cf_distance(o, law, 1.0)));
    // Exact joint-minus-product gap on the same reduced grid the experiment uses.
    const auto cs = o.y_coefficients(1.0);
    const auto ct = o.y_coefficients(2.0);
    const auto grid = standard_xi_grid(standard_xi_radius(1.5), 8, 3);
    double gap = 0.0;
    for (const Vec2& x1 : grid) {
      const double ps = std::exp(-exponent(cs, x1, 1.5, 1.0, o.dt));
      for (const Vec2& x2 : grid) {
        const double pt = std::exp(-exponent(ct, x2, 1.5, 1.0, o.dt));
        double e = 0.0;
        for (std::size_t k = 0; k < ct.size(); ++k) {
          const double u = (k < cs.size() ? x1.dot(cs[k]) : 0.0) + x2.dot(ct[k]);
          e += std::pow(std::abs(u), 1.5);
        }
        gap = std::max(gap, std::abs(std::exp(-o.dt * e) - ps * pt));
      }
    }
    v.note("info  exact finite-eps pair factorization gap: " + fmt("%.4f", gap));
  }, all);

  timed(7, "moment growth: log-log slope of E|Z_t|^kappa <= kappa/alpha + 0.15 (beta=gamma=1)", [](Verdict& v) {
    ExperimentConfig b = base(CheckKind::moments, "c7_moments_brownian", 107);
    b.params.beta = 1.0;
    b.n_paths = 2000;
    b.settings.kappa = 2.0;
    b.settings.slope_slack = 0.15;
    run_into(v, b, "c7_brownian");
    ExperimentConfig s = base(CheckKind::moments, "c7_moments_stable", 1070);
    s.params.noise = NoiseSpec::stable(1.5, 1.0);
    s.params.beta = 1.0;
    s.n_paths = 1000;
    s.settings.kappa = 0.75;
    s.settings.slope_slack = 0.15;
    run_into(v, s, "c7_stable");
  }, all);

  timed(8, "ODE: |w/f^2 - 1| <= 1e-6, expansion slope within 0.15 of -min(2beta-1, beta)", [](Verdict& v) {
    for (const double beta : {0.6, 0.75, 1.0}) {
      ExperimentConfig c = base(CheckKind::ode, "c8_ode_beta_" + fmt("%g", beta), 108);
      c.params.beta = beta;
      c.settings.ode_t_end = 500;
      c.settings.wronskian_tol = 1e-6;
      c.settings.slope_tol = 0.15;
      v.note("beta = " + fmt("%g", beta));
      run_into(v, c, "c8_beta_" + fmt("%g", beta));
    }
  }, all);

  timed(9, "averaging ratios within 1e-2 at t=1000, integral ratios within 0.05 of 1 at eps=1e-3", [](Verdict& v) {
    struct Case { double beta, alpha; };
    for (const Case k : {Case{1.0, 2.0}, Case{0.75, 1.5}}) {
      ExperimentConfig c = base(CheckKind::averaging, "c9_beta_" + fmt("%g", k.beta), 109);
      c.params.beta = k.beta;
      c.params.noise = k.alpha == 2.0 ? NoiseSpec::brownian() : NoiseSpec::stable(k.alpha, 1.0);
      c.eps_list = {1e-1, 1e-2, 1e-3};
      c.settings.avg_t = 1000;
      c.settings.avg_tol = 1e-2;
      c.settings.asym_tol = 0.05;
      v.note("(beta, alpha) = (" + fmt("%g", k.beta) + ", " + fmt("%g", k.alpha) + ")");
      run_into(v, c, "c9_beta_" + fmt("%g", k.beta), {"boundedness_max"});
    }
    // How fast the beta < 1 ratio approaches 1 beyond the tested eps.
    const std::vector<double> far{1e-3, 1e-4, 1e-5, 1e-6};
    const auto ia = integral_asymptotic_check(0.75, 1.5, far, 1.0);
    std::string line = "info  (0.75, 1.5) ratio at eps = 1e-3..1e-6:";
    for (const double r : ia.ratios) line += " " + fmt("%.4f", r);
    v.note(line);
  }, all);

  timed(10, "oscillation: covariance within 3 sigma of s cos((t-s)/eps)/2, eps values > 6 sigma apart",
        [](Verdict& v) {
    ExperimentConfig c = base(CheckKind::oscillation, "c10_oscillation", 110);
    c.eps_list = {1e-2, 5e-3};
    c.n_paths = 100000;
    c.settings.osc_s = 1.0;
    c.settings.osc_t = 1.1;
    c.settings.osc_sigmas = 3.0;
    c.settings.osc_separation = 6.0;
    run_into(v, c, "c10", {"sigmas_from_grid_exact"});
  }, all);

  timed(11, "alpha=2 stable CFs equal the Gaussian-kernel CFs to 1e-12 (C = 1/4)", [](Verdict& v) {
    const double c = c_tilde(2.0, 0.5);
    v.note("c_tilde(2, 1/2) = " + fmt("%.17g", c));
    const auto grid = standard_xi_grid(standard_xi_radius(2.0));
    struct Case { const char* name; double beta; };
    for (const Case k : {Case{"super_critical", 2.0}, Case{"critical", 1.0}, Case{"sub_critical", 0.75}}) {
      const LimitLaw law = make_limit_law(NoiseSpec::brownian(), k.beta, 1.0);
      double worst = 0.0;
      for (const double t : {0.5, 1.0, 2.0}) {
        for (const Vec2& xi : grid) {
          const double stable = stable_marginal_cf(law.regime.regime, 2.0, k.beta, c, t, xi);
          worst = std::max(worst, std::abs(stable - law.cf(t, xi)));
        }
      }
      const bool ok = worst <= 1e-12;
      v.pass = v.pass && ok;
      v.note(std::string(ok ? "ok    " : "FAIL  ") + k.name + " max |difference| = " + fmt("%.3g", worst));
    }
  }, all);

  std::printf("acceptance: %s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
