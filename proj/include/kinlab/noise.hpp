#pragma once

#include "kinlab/random.hpp"

namespace kinlab {

/// Driving noise with characteristic exponent psi(xi) = -a |xi|^alpha.
///
/// alpha = 2 is reserved for standard Brownian motion, which fixes a = 1/2.
/// For alpha < 2 the scale defaults to a = 1.
struct NoiseSpec {
  double alpha = 2.0;
  double a = 0.5;

  static NoiseSpec brownian() { return {2.0, 0.5}; }
  static NoiseSpec stable(double alpha, double a = 1.0) { return {alpha, a}; }

  bool is_brownian() const noexcept { return alpha == 2.0; }
  void validate() const;
};

/// One draw of a symmetric alpha-stable variable with CF exp(-|xi|^alpha)
/// (Chambers-Mallows-Stuck). Valid for 0 < alpha <= 2.
double standard_stable_sample(double alpha, RandomStream& rng);

/// Increment of the driving process over a step of length dt.
double levy_increment(const NoiseSpec& spec, double dt, RandomStream& rng);

/// Exact characteristic function of L_t at xi.
double noise_cf(const NoiseSpec& spec, double t, double xi);

}  // namespace kinlab
