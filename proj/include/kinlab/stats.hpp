#pragma once

#include <span>

namespace kinlab {

/// Least-squares slope of y against x.
double regression_slope(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log y against log x; all values must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kinlab
