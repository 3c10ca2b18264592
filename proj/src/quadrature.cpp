#include "kinlab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {
constexpr unsigned kMaxDepth = 30;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    double abs_tol, double rel_tol) {
  if (lo == hi) return {};
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, lo, hi, kMaxDepth, rel_tol, &error, &l1);
  if (!std::isfinite(value)) fail(ErrorCode::numeric, "quadrature produced a non-finite value");
  // The Boost estimate is |Kronrod - Gauss| on the last refinement level.
  const double budget = std::max(abs_tol, rel_tol * l1);
  if (error > 1e3 * budget) {
    fail(ErrorCode::numeric, "quadrature on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                 "] did not converge (estimate " + std::to_string(error) + ")");
  }
  return {value, error};
}

QuadratureResult integrate_pieces(const std::function<double(double)>& f,
                                  std::span<const double> breakpoints, double abs_tol,
                                  double rel_tol) {
  QuadratureResult total;
  if (breakpoints.size() < 2) return total;
  const double pieces = static_cast<double>(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto piece =
        integrate_adaptive(f, breakpoints[i], breakpoints[i + 1], abs_tol / pieces, rel_tol);
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
  }
  return total;
}

}  // namespace kinlab
