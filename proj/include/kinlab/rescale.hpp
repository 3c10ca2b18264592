#pragma once

#include <string_view>

#include "kinlab/types.hpp"

namespace kinlab {

enum class Regime { super_critical, critical, sub_critical };

std::string_view to_string(Regime regime) noexcept;

/// Scaling exponent q, the rate exponent min(q, 1/alpha) and the regime.
/// alpha = 2 uses the Brownian definition q = beta/(gamma + 1); otherwise
/// q = beta/(gamma + alpha - 1). The regime follows the sign of alpha q - 1.
struct RegimeInfo {
  double alpha = 2.0;
  double q = 0.0;
  double rate_exponent = 0.0;
  Regime regime = Regime::super_critical;

  bool brownian() const noexcept { return alpha == 2.0; }
};

/// Rotation of angle t: [[cos t, -sin t], [sin t, cos t]]. Note e^{tA} = rotation(-t).
Mat2 rotation(double t);

/// Free harmonic flow e^{tA}, A = [[0, 1], [-1, 0]].
inline Mat2 free_flow(double t) { return rotation(-t); }

RegimeInfo classify(double alpha, double beta, double gamma);

/// eps^{rate} * e^{-(t/eps)A} z = eps^{rate} * rotation(t/eps) * z, with z the state
/// observed at time t/eps. This removes the free rotation e^{tA} of Z, so the
/// result has a pathwise limit. Requires t >= eps * t0.
Vec2 rescale_Y(const Vec2& z, double t, double eps, const RegimeInfo& info, double t0);

/// eps^{rate} * z, without deframing.
Vec2 rescale_Z(const Vec2& z, double eps, const RegimeInfo& info);

}  // namespace kinlab
