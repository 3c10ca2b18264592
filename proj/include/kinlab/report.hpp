#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace kinlab {

struct Metric {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string relation;           ///< how value and threshold were compared
  std::optional<double> target;   ///< reference value for deviation checks
};

struct VerificationReport {
  std::string experiment;
  std::string regime;
  std::vector<Metric> metrics;
  nlohmann::json meta = nlohmann::json::object();

  /// value <= threshold.
  const Metric& add_upper(const std::string& name, double value, double threshold);
  /// value >= threshold.
  const Metric& add_lower(const std::string& name, double value, double threshold);
  /// |value - target| <= tolerance.
  const Metric& add_near(const std::string& name, double value, double target, double tolerance);
  /// Informational entry with an explicit verdict.
  const Metric& add(Metric metric);

  bool passed() const;
  const Metric* find(const std::string& name) const;

  nlohmann::json to_json() const;
  std::string summary() const;
  /// Appends `experiment,regime,metric,value,threshold,pass` rows, writing
  /// the header when the file is new.
  void append_metrics_csv(const std::string& path) const;
};

}  // namespace kinlab
