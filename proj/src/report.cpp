#include "kinlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

const Metric& VerificationReport::add_upper(const std::string& name, double value, double threshold) {
  return add({name, value, threshold, std::isfinite(value) && value <= threshold, "<=", {}});
}

const Metric& VerificationReport::add_lower(const std::string& name, double value, double threshold) {
  return add({name, value, threshold, std::isfinite(value) && value >= threshold, ">=", {}});
}

const Metric& VerificationReport::add_near(const std::string& name, double value, double target,
                                           double tolerance) {
  return add({name, value, tolerance, std::abs(value - target) <= tolerance, "|value-target|<=",
              target});
}

const Metric& VerificationReport::add(Metric metric) {
  require(find(metric.name) == nullptr, ErrorCode::input, "duplicate metric " + metric.name);
  metrics.push_back(std::move(metric));
  return metrics.back();
}

bool VerificationReport::passed() const {
  for (const Metric& m : metrics) {
    if (!m.pass) return false;
  }
  return true;
}

const Metric* VerificationReport::find(const std::string& name) const {
  for (const Metric& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["regime"] = regime;
  nlohmann::json ms = nlohmann::json::object();
  for (const Metric& m : metrics) {
    nlohmann::json entry{{"value", m.value}, {"threshold", m.threshold}, {"pass", m.pass},
                         {"relation", m.relation}};
    if (m.target) entry["target"] = *m.target;
    // JSON has no NaN/inf; keep the verdict and record the value as text.
    if (!std::isfinite(m.value)) entry["value"] = fmt(m.value);
    ms[m.name] = std::move(entry);
  }
  j["metrics"] = std::move(ms);
  j["meta"] = meta;
  j["passed"] = passed();
  return j;
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  out << "experiment " << experiment << " (" << regime << ")\n";
  for (const Metric& m : metrics) {
    out << "  " << (m.pass ? "PASS " : "FAIL ") << m.name << " = " << short_fmt(m.value);
    if (m.target) {
      out << "  target " << short_fmt(*m.target) << " +/- " << short_fmt(m.threshold);
    } else {
      out << "  " << m.relation << " " << short_fmt(m.threshold);
    }
    out << '\n';
  }
  out << (passed() ? "all checks passed\n" : "some checks failed\n");
  return out.str();
}

void VerificationReport::append_metrics_csv(const std::string& path) const {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for appending");
  if (fresh) out << "experiment,regime,metric,value,threshold,pass\n";
  for (const Metric& m : metrics) {
    out << experiment << ',' << regime << ',' << m.name << ',' << fmt(m.value) << ','
        << fmt(m.threshold) << ',' << (m.pass ? "true" : "false") << '\n';
  }
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

}  // namespace kinlab
