// Command-line runner. Talks to the library only through kinlab.h.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kinlab/kinlab.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitStatistical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(kl_status status) {
  if (status == KL_OK) return kExitPass;
  if (status == KL_ERR_CONFIG || status == KL_ERR_PARAMETER) return kExitConfig;
  return kExitRuntime;
}

int report_error(kl_status status, const char* what) {
  std::fprintf(stderr, "kinlab: %s failed (%s): %s\n", what, kl_status_string(status),
               kl_last_error_message());
  return exit_code_for(status);
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  char buf[40];
  for (const double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += (out.empty() ? "" : " ") + std::string(buf);
  }
  return out;
}

struct Common {
  long long seed = -1;
  int threads = -1;
  std::string output_dir;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Override run.master_seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", c.threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--output-dir", c.output_dir,
                  "Output directory (default: $KINLAB_OUTPUT_DIR, then the config value)");
  cmd->add_option("--set", c.overrides, "Override a config field, e.g. --set system.beta=0.75");
  cmd->add_flag("-q,--quiet", c.quiet, "Only print the verdict line");
}

/// Applies overrides, runs, prints the summary and maps the verdict to an exit code.
int run_config(kl_config* cfg, const Common& c, bool from_file) {
  std::vector<std::pair<std::string, std::string>> sets;
  if (c.seed >= 0) sets.emplace_back("run.master_seed", std::to_string(c.seed));
  if (c.threads >= 0) sets.emplace_back("run.threads", std::to_string(c.threads));
  if (!c.output_dir.empty()) {
    sets.emplace_back("experiment.output_dir", c.output_dir);
  } else if (const char* env = std::getenv("KINLAB_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    // A config file that names its own directory keeps it.
    bool config_has_dir = false;
    if (from_file) {
      char* text = nullptr;
      if (kl_config_serialize(cfg, &text) == KL_OK) {
        config_has_dir = std::string(text).find("output_dir = kinlab_out\n") == std::string::npos;
        kl_free_string(text);
      }
    }
    if (!config_has_dir) sets.emplace_back("experiment.output_dir", env);
  }
  for (const std::string& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "kinlab: --set expects key=value, got '%s'\n", o.c_str());
      return kExitConfig;
    }
    sets.emplace_back(o.substr(0, eq), o.substr(eq + 1));
  }
  for (const auto& [key, value] : sets) {
    if (kl_status st = kl_config_set(cfg, key.c_str(), value.c_str()); st != KL_OK) {
      return report_error(st, "config override");
    }
  }
  if (kl_status st = kl_config_validate(cfg); st != KL_OK) return report_error(st, "config validation");

  kl_report* report = nullptr;
  if (kl_status st = kl_run(cfg, &report); st != KL_OK) return report_error(st, "run");
  const bool passed = kl_report_passed(report) != 0;
  if (c.quiet) {
    std::printf("%s\n", passed ? "PASS" : "FAIL");
  } else {
    std::fputs(kl_report_summary(report), stdout);
  }
  kl_report_destroy(report);
  return passed ? kExitPass : kExitStatistical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinlab: scaling-limit laboratory for the damped stochastic oscillator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kl_version()));

  Common common;

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by an INI config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(run, common);

  double alpha = 2.0;
  double beta = 1.0;
  double gamma = 1.0;
  auto* regimes = app.add_subcommand("regimes", "Classify (alpha, beta, gamma) and describe the limit");
  regimes->add_option("--alpha", alpha, "Stability index in (1, 2]")->required();
  regimes->add_option("--beta", beta, "Friction time decay")->required();
  regimes->add_option("--gamma", gamma, "Friction velocity power")->required();

  double ode_beta = 0.75;
  double ode_t_end = 500.0;
  auto* ode = app.add_subcommand("ode-check", "Wronskian identity and expansion-error slope");
  ode->add_option("--beta", ode_beta, "Friction exponent in (1/2, 1]")->capture_default_str();
  ode->add_option("--t-end", ode_t_end, "Integration horizon")->capture_default_str();
  add_common(ode, common);

  double avg_beta = 1.0;
  double avg_alpha = 2.0;
  std::vector<double> avg_eps{1e-1, 1e-2, 1e-3};
  auto* avg = app.add_subcommand("averaging-check", "Periodic averaging and integral asymptotics oracles");
  avg->add_option("--beta", avg_beta, "beta for the integral asymptotics")->capture_default_str();
  avg->add_option("--alpha", avg_alpha, "alpha for |cos|^alpha and the integral asymptotics")->capture_default_str();
  avg->add_option("--eps", avg_eps, "Decreasing eps values")->expected(1, -1);
  add_common(avg, common);

  std::vector<double> osc_eps{1e-2, 5e-3};
  double osc_s = 1.0;
  double osc_t = 1.1;
  std::size_t osc_paths = 100000;
  double osc_dt = 0.05;
  auto* osc = app.add_subcommand("oscillation-check", "Oscillating covariance of the undeframed process");
  osc->add_option("--eps", osc_eps, "Decreasing eps values")->expected(1, -1);
  osc->add_option("--s", osc_s, "Earlier time")->capture_default_str();
  osc->add_option("--t", osc_t, "Later time")->capture_default_str();
  osc->add_option("--n-paths", osc_paths, "Monte Carlo sample size")->capture_default_str();
  osc->add_option("--dt", osc_dt, "Quadrature step in physical time")->capture_default_str();
  add_common(osc, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (regimes->parsed()) {
    char* table = nullptr;
    if (kl_status st = kl_regime_table(alpha, beta, gamma, &table); st != KL_OK) {
      return report_error(st, "regimes");
    }
    std::fputs(table, stdout);
    kl_free_string(table);
    return kExitPass;
  }

  kl_config* cfg = nullptr;
  kl_status st = KL_OK;
  if (run->parsed()) {
    st = kl_config_load(config_path.c_str(), &cfg);
  } else if (ode->parsed()) {
    st = kl_config_default("ode", &cfg);
    if (st == KL_OK) st = kl_config_set(cfg, "system.beta", join({ode_beta}).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "check.ode_t_end", join({ode_t_end}).c_str());
  } else if (avg->parsed()) {
    st = kl_config_default("averaging", &cfg);
    if (st == KL_OK) st = kl_config_set(cfg, "system.beta", join({avg_beta}).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "noise.alpha", join({avg_alpha}).c_str());
    if (st == KL_OK && avg_alpha < 2.0) st = kl_config_set(cfg, "noise.a", "1");
    if (st == KL_OK) st = kl_config_set(cfg, "run.eps_list", join(avg_eps).c_str());
  } else {
    st = kl_config_default("oscillation", &cfg);
    if (st == KL_OK) st = kl_config_set(cfg, "run.eps_list", join(osc_eps).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "check.osc_s", join({osc_s}).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "check.osc_t", join({osc_t}).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "check.osc_dt", join({osc_dt}).c_str());
    if (st == KL_OK) st = kl_config_set(cfg, "run.n_paths", std::to_string(osc_paths).c_str());
  }
  if (st != KL_OK) {
    const int code = report_error(st, "config");
    kl_config_destroy(cfg);
    return code;
  }
  const int code = run_config(cfg, common, run->parsed());
  kl_config_destroy(cfg);
  return code;
}
