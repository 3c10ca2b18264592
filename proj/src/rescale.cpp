#include "kinlab/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {
// alpha q is a ratio of user inputs; treat it as critical within a few ulps.
constexpr double kCriticalTolerance = 1e-12;
}  // namespace

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::super_critical: return "super_critical";
    case Regime::critical: return "critical";
    case Regime::sub_critical: return "sub_critical";
  }
  return "unknown";
}

Mat2 rotation(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

RegimeInfo classify(double alpha, double beta, double gamma) {
  require(alpha > 1.0 && alpha <= 2.0, ErrorCode::parameter, "alpha must lie in (1, 2]");
  require(beta >= 0.0 && gamma >= 0.0, ErrorCode::parameter, "beta and gamma must be >= 0");
  RegimeInfo info;
  info.alpha = alpha;
  info.q = alpha == 2.0 ? beta / (gamma + 1.0) : beta / (gamma + alpha - 1.0);
  info.rate_exponent = std::min(info.q, 1.0 / alpha);
  const double balance = alpha * info.q - 1.0;
  if (std::abs(balance) <= kCriticalTolerance) {
    info.regime = Regime::critical;
  } else {
    info.regime = balance > 0.0 ? Regime::super_critical : Regime::sub_critical;
  }
  return info;
}

Vec2 rescale_Y(const Vec2& z, double t, double eps, const RegimeInfo& info, double t0) {
  require(eps > 0.0, ErrorCode::parameter, "eps must be positive");
  if (t < eps * t0 * (1.0 - 1e-14)) {
    fail(ErrorCode::domain, "rescale_Y needs t >= eps*t0 (t = " + std::to_string(t) +
                                ", eps*t0 = " + std::to_string(eps * t0) + ")");
  }
  // e^{-(t/eps)A} = rotation(t/eps) undoes the free flow e^{tA} of Z.
  return std::pow(eps, info.rate_exponent) * (rotation(t / eps) * z);
}

Vec2 rescale_Z(const Vec2& z, double eps, const RegimeInfo& info) {
  require(eps > 0.0, ErrorCode::parameter, "eps must be positive");
  return std::pow(eps, info.rate_exponent) * z;
}

}  // namespace kinlab
