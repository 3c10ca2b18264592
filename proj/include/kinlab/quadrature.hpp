#pragma once

#include <functional>
#include <span>

namespace kinlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on [lo, hi]. Throws a numeric
/// error when the estimated error exceeds max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    double abs_tol = 1e-12, double rel_tol = 1e-12);

/// Same, over consecutive pieces [b0, b1], [b1, b2], ... so that kinks or
/// long oscillatory ranges sit on piece boundaries.
QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol = 1e-12,
                                  double rel_tol = 1e-12);

}  // namespace kinlab
