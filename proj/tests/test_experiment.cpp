#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "kinlab/error.hpp"
#include "kinlab/experiment.hpp"

using namespace kinlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kinlab_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_field(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("check kinds round-trip") {
  for (const CheckKind k : {CheckKind::regime_marginal, CheckKind::regime_pair, CheckKind::corollary,
                            CheckKind::moments, CheckKind::ode, CheckKind::averaging, CheckKind::oscillation}) {
    CHECK(parse_check_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_check_kind("nope"), Error);
}

TEST_CASE("config serialize/parse round-trip") {
  ExperimentConfig c = default_config(CheckKind::regime_pair);
  c.params.noise = NoiseSpec::stable(1.5, 0.7);
  c.params.beta = 0.8;
  c.eps_list = {1.0 / 3.0, 0.1};
  c.dt = 0.1 / 7;
  c.master_seed = 1234567890123ULL;
  c.settings.fit_window = {210, 390};
  c.settings.moment_times = {5, 50};
  const std::string text = c.serialize();
  const ExperimentConfig back = ExperimentConfig::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.dt == c.dt);
  CHECK(back.eps_list == c.eps_list);
  CHECK(back.master_seed == c.master_seed);
  CHECK(back.params.noise.a == 0.7);
  CHECK(back.settings.fit_window.hi == 390);
  CHECK(back.check == CheckKind::regime_pair);
  CHECK(back.to_json()["noise"]["alpha"] == "1.5");
}

TEST_CASE("config parse errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[bogus]\nx = 1\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[bogus]\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[run]\nsteps = 1\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[run]\ndt = fast\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/kinlab.ini"), Error);
  const ExperimentConfig c = ExperimentConfig::parse("[system]\nbeta = 2\n[run]\neps_list = 0.1 0.05\n");
  CHECK(c.params.beta == 2.0);
  CHECK(c.eps_list.size() == 2);
}

TEST_CASE("set_field") {
  ExperimentConfig c;
  c.set_field("system.beta", "1.25");
  c.set_field("run.obs_times", "1 2");
  c.set_field("check.fit_window", "100 300");
  CHECK(c.params.beta == 1.25);
  CHECK(c.obs_times.size() == 2);
  CHECK(c.settings.fit_window.lo == 100);
  CHECK_THROWS_AS(c.set_field("system.delta", "1"), Error);
  CHECK_THROWS_AS(c.set_field("beta", "1"), Error);
}

TEST_CASE("validation names the offending field") {
  ExperimentConfig c;
  c.params.beta = 2.0;
  CHECK(config_error_field(c).empty());

  ExperimentConfig bad = c;
  bad.params.noise.a = 1.0;
  CHECK(config_error_field(bad).find("noise.a") != std::string::npos);

  bad = c;
  bad.eps_list = {0.01, 0.1};
  CHECK(config_error_field(bad).find("run.eps_list") != std::string::npos);

  bad = c;
  bad.params.beta = 0.4;
  CHECK(config_error_field(bad).find("system.beta") != std::string::npos);

  bad = default_config(CheckKind::regime_pair);
  bad.obs_times = {1.0};
  CHECK(config_error_field(bad).find("run.obs_times") != std::string::npos);

  bad = default_config(CheckKind::moments);
  bad.params.noise = NoiseSpec::stable(1.5);
  bad.settings.kappa = 1.5;
  CHECK(config_error_field(bad).find("check.kappa") != std::string::npos);

  bad = c;
  bad.params.noise = NoiseSpec::stable(1.5);
  bad.params.gamma = 1.6;
  CHECK(config_error_field(bad).find("system.gamma") != std::string::npos);
}

TEST_CASE("run_experiment writes deterministic samples and a report") {
  ExperimentConfig c;
  c.name = "unit_marginal";
  c.params.beta = 2.0;
  c.eps_list = {0.1, 0.05};
  c.n_paths = 200;
  c.dt = 0.05;
  c.threads = 2;
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  c.output_dir = a.string();
  const VerificationReport r1 = run_experiment(c);
  c.output_dir = b.string();
  c.threads = 1;
  const VerificationReport r2 = run_experiment(c);

  CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
  CHECK(slurp(a / "samples.csv").rfind("time,eps,traj,x,v\n", 0) == 0);
  CHECK(r1.to_json()["metrics"] == r2.to_json()["metrics"]);
  CHECK(fs::exists(a / "samples.meta.json"));
  CHECK(fs::exists(a / "summary.txt"));

  const auto j = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(j["experiment"] == "unit_marginal");
  CHECK(j["regime"] == "super_critical");
  CHECK(j["metrics"].contains("eps=0.05/t=1/cov_xx"));
  CHECK(j["metrics"].contains("eps=0.05/t=1/ks_v"));
  CHECK(j["metrics"].contains("trend/cf_sup_distance/eps=0.05_vs_eps=0.1"));
  CHECK(j["metrics"]["eps=0.05/t=1/cov_xx"]["target"] == 0.5);
  CHECK(j["meta"]["config"]["run"]["n_paths"] == "200");
  CHECK(ExperimentConfig::parse(j["meta"]["config_ini"].get<std::string>()).n_paths == 200);
  CHECK(j["passed"].is_boolean());

  // metrics.csv gains rows but only one header across runs.
  run_experiment(c);
  const std::string csv = slurp(b / "metrics.csv");
  CHECK(csv.rfind("experiment,regime,metric,value,threshold,pass\n", 0) == 0);
  CHECK(csv.find("experiment,regime", 1) == std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("deterministic checks through run_experiment") {
  ExperimentConfig c = default_config(CheckKind::ode);
  c.output_dir = scratch("ode").string();
  const VerificationReport r = run_experiment(c);
  CHECK(r.passed());
  REQUIRE(r.find("wronskian_max_deviation") != nullptr);
  CHECK(r.find("wronskian_max_deviation")->value < 1e-6);
  CHECK(r.find("expansion_error_slope") != nullptr);
  CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "samples.csv"));
  fs::remove_all(c.output_dir);
}

TEST_CASE("report bookkeeping") {
  VerificationReport r;
  r.experiment = "x";
  CHECK(r.add_upper("a", 1.0, 2.0).pass);
  CHECK_FALSE(r.add_lower("b", 1.0, 2.0).pass);
  CHECK(r.add_near("c", 1.01, 1.0, 0.02).pass);
  CHECK_THROWS_AS(r.add_upper("a", 0.0, 1.0), Error);
  CHECK_FALSE(r.passed());
  CHECK(r.find("c")->target.value() == 1.0);
  CHECK(r.find("zz") == nullptr);
  CHECK(r.summary().find("FAIL") != std::string::npos);
}

TEST_CASE("regime table") {
  const std::string bc = regime_table(2.0, 1.0, 1.0);
  CHECK(bc.find("critical") != std::string::npos);
  CHECK(bc.find("q              0.5") != std::string::npos);
  CHECK(bc.find("state order    (X, V)") != std::string::npos);
  const std::string ss = regime_table(1.5, 1.5, 1.0);
  CHECK(ss.find("super_critical") != std::string::npos);
  CHECK(ss.find("gamma in (0,alpha)  yes") != std::string::npos);
  CHECK(regime_table(2.0, 2.0, 3.0).find("limit not covered") != std::string::npos);
  CHECK_THROWS_AS(regime_table(0.5, 1.0, 1.0), Error);
}
