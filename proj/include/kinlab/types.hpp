#pragma once

#include <Eigen/Core>

namespace kinlab {

/// State vector in the (X, V) order used everywhere in the library.
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Spectral norm of a 2x2 matrix.
double operator_norm(const Mat2& m);

}  // namespace kinlab
