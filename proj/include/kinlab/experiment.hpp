#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kinlab/kinetic_sim.hpp"
#include "kinlab/report.hpp"
#include "kinlab/types.hpp"

namespace kinlab {

enum class CheckKind { regime_marginal, regime_pair, corollary, moments, ode, averaging, oscillation };

std::string_view to_string(CheckKind kind) noexcept;
CheckKind parse_check_kind(std::string_view text);

/// Tolerances and check-specific inputs. Every field has an INI key of the
/// same name in the [check] section.
struct CheckSettings {
  double cov_tol = 0.03;
  double pair_tol = 0.04;
  double cf_tol = 0.05;
  double kappa = 2.0;
  std::vector<double> moment_times{10, 20, 50, 100, 200, 500, 1000};
  double slope_slack = 0.15;
  double ode_t_end = 500;
  double ode_tol = 1e-10;
  Interval fit_window{200, 400};
  Interval slope_range{50, 500};
  double wronskian_tol = 1e-6;
  double slope_tol = 0.15;
  double avg_t = 1000;
  double avg_tol = 1e-2;
  double asym_t = 1.0;
  double asym_tol = 0.05;
  double bound_max = 10.0;
  double osc_s = 1.0;
  double osc_t = 1.1;
  double osc_dt = 0.05;
  double osc_sigmas = 3.0;
  double osc_separation = 6.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  CheckKind check = CheckKind::regime_marginal;
  SystemParams params;
  std::vector<double> eps_list{1e-2};  ///< strictly decreasing
  std::vector<double> obs_times{1.0};  ///< rescaled times
  std::size_t n_paths = 20000;
  double dt = 2e-2;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;
  std::string output_dir = "kinlab_out";
  CheckSettings settings;

  /// Throws a config error naming the offending field.
  void validate() const;

  /// Sets one field from its text form, addressed as "section.key".
  void set_field(std::string_view dotted_key, const std::string& value);

  static ExperimentConfig parse(std::string_view ini_text);
  static ExperimentConfig load(const std::string& path);
  /// INI text with every field at 17 significant digits; parse() inverts it.
  std::string serialize() const;
  nlohmann::json to_json() const;
};

/// Defaults for a check kind (used by the single-purpose CLI commands).
ExperimentConfig default_config(CheckKind kind);

/// Runs the configured check, writes report.json, summary.txt and an
/// appended metrics.csv into output_dir (plus samples.csv and
/// samples.meta.json for simulation checks) and returns the report.
VerificationReport run_experiment(const ExperimentConfig& config);

/// Human-readable classification: q, rate exponent, regime and limit.
std::string regime_table(double alpha, double beta, double gamma);

}  // namespace kinlab
