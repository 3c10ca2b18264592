#include "kinlab/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kinlab/error.hpp"

namespace kinlab {

void NoiseSpec::validate() const {
  require(alpha > 1.0 && alpha <= 2.0, ErrorCode::parameter,
          "noise alpha must lie in (1, 2], got " + std::to_string(alpha));
  require(a > 0.0 && std::isfinite(a), ErrorCode::parameter, "noise scale a must be positive");
  require(alpha < 2.0 || a == 0.5, ErrorCode::parameter,
          "alpha = 2 denotes standard Brownian motion and requires a = 1/2");
}

double standard_stable_sample(double alpha, RandomStream& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    fail(ErrorCode::parameter, "stable index must lie in (0, 2], got " + std::to_string(alpha));
  }
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(v);
  // sin(alpha v) / cos(v)^{1/alpha} * (cos((1 - alpha) v) / w)^{(1 - alpha)/alpha},
  // with the magnitude taken through logs so extreme draws do not overflow early.
  const double log_mag =
      ((1.0 - alpha) * std::log(std::cos((1.0 - alpha) * v) / w) - std::log(std::cos(v))) / alpha;
  return std::sin(alpha * v) * std::exp(log_mag);
}

double levy_increment(const NoiseSpec& spec, double dt, RandomStream& rng) {
  if (!(dt > 0.0)) fail(ErrorCode::parameter, "increment length dt must be positive");
  if (spec.is_brownian()) return std::sqrt(dt) * rng.normal();
  return std::pow(spec.a * dt, 1.0 / spec.alpha) * standard_stable_sample(spec.alpha, rng);
}

double noise_cf(const NoiseSpec& spec, double t, double xi) {
  spec.validate();
  require(t > 0.0, ErrorCode::parameter, "noise_cf requires t > 0");
  return std::exp(-spec.a * t * std::pow(std::abs(xi), spec.alpha));
}

}  // namespace kinlab
