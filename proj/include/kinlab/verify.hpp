#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kinlab/limits.hpp"
#include "kinlab/types.hpp"

namespace kinlab {

/// Empirical characteristic function on a set of xi points.
struct CfGrid {
  std::vector<Vec2> xi_points;
  std::vector<std::complex<double>> values;
  std::vector<double> std_errors;

  double max_std_error() const;
};

/// `directions` equally spaced angles times `radii` equally spaced norms in (0, max_radius].
std::vector<Vec2> standard_xi_grid(double max_radius, int directions = 24, int radii = 6);
/// Radius 2 for stable noise, 3 for Brownian.
double standard_xi_radius(double alpha);

CfGrid empirical_cf(std::span<const Vec2> samples, std::span<const Vec2> xi_points);

/// max |emp - law.cf(t, xi)| over the grid.
double cf_sup_distance(const CfGrid& emp, const LimitLaw& law, double t);
double cf_sup_distance(const CfGrid& emp, const std::function<double(const Vec2&)>& target);
/// Between two empirical CFs on the same grid.
double cf_sup_distance(const CfGrid& a, const CfGrid& b);

/// Empirical joint CF of (Y_s, Y_t) for every (xi1, xi2) in the product of two grids.
struct PairCfGrid {
  std::vector<Vec2> xi1;
  std::vector<Vec2> xi2;
  std::vector<std::complex<double>> values;  ///< values[i * xi2.size() + j]
  std::vector<double> std_errors;
};

PairCfGrid empirical_pair_cf(std::span<const Vec2> at_s, std::span<const Vec2> at_t,
                             std::span<const Vec2> xi1, std::span<const Vec2> xi2);

/// max |joint(xi1, xi2) - marginal_s(xi1) marginal_t(xi2)| with all three CFs empirical.
double pair_factorization_gap(std::span<const Vec2> at_s, std::span<const Vec2> at_t,
                              std::span<const Vec2> xi1, std::span<const Vec2> xi2);

/// max |joint(xi1, xi2) - law.pair_cf(s, t, xi1, xi2)|.
double pair_cf_sup_distance(const PairCfGrid& emp, const LimitLaw& law, double s, double t);

/// Unbiased sample covariance.
Mat2 empirical_cov(std::span<const Vec2> samples);
/// Unbiased sample cross-covariance E[(a - mean a)(b - mean b)^T].
Mat2 empirical_cross_cov(std::span<const Vec2> a, std::span<const Vec2> b);

/// sup |F_n - F| for the empirical CDF of the samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& reference_cdf);
double normal_cdf(double x, double sigma = 1.0);
/// 1% critical value of the Kolmogorov statistic, 1.63 / sqrt(n).
double ks_critical_value(std::size_t n);

/// Integrand weight g for the averaging check: t^r or exp(r t^{1-beta}).
struct GFunction {
  enum class Kind { power, stretched_exp };
  Kind kind = Kind::power;
  double r = 0.0;
  double beta = 0.5;

  static GFunction power(double r) { return {Kind::power, r, 0.0}; }
  static GFunction stretched_exp(double r, double beta) { return {Kind::stretched_exp, r, beta}; }
  double log_value(double t) const;
};

/// 2 pi-periodic factor h.
struct PeriodicH {
  enum class Kind { cos2, sin2, sin_cos, abs_cos_pow, one };
  Kind kind = Kind::cos2;
  double alpha = 2.0;  ///< exponent for abs_cos_pow

  double operator()(double t) const;
  /// Mean over one period.
  double mean() const;
};

/// For every t in t_grid: int_{t0}^t g h / (mean(h) int_{t0}^t g), or
/// int g h / int g when mean(h) = 0.
std::vector<double> averaging_check(const GFunction& g, const PeriodicH& h,
                                    std::span<const double> t_grid, double t0 = 1.0);

struct IntegralAsymptotics {
  std::vector<double> ratios;       ///< int_{t0}^{T} f^{-alpha} / (k f(T)^{-alpha} T^beta), T = t/eps
  std::vector<double> boundedness;  ///< int_{t0}^{T} f^{-alpha} u^{1-2 beta} / (f(T)^{-alpha} eps^{beta-1})
};

IntegralAsymptotics integral_asymptotic_check(double beta, double alpha,
                                              std::span<const double> eps_grid, double t,
                                              double t0 = 1.0);

struct OscillationResult {
  double empirical = 0.0;   ///< sample covariance of (I_s, I_t)
  double predicted = 0.0;   ///< s cos((t - s)/eps) / 2
  double grid_exact = 0.0;  ///< exact covariance of the discretized integrals
  double std_error = 0.0;   ///< MC standard error of `empirical`
};

/// Simulates I_u = sqrt(eps) int_{t0}^{u/eps} sin(u/eps - r) dB_r at u = s, t on a
/// grid of step dt (plus a shortened step landing on s/eps).
OscillationResult oscillation_check(double eps, double s, double t, std::size_t n_paths,
                                    double dt, std::uint64_t master_seed, double t0 = 1.0,
                                    unsigned threads = 0);

/// Sup CF distance between the samples and the same samples rotated by angle.
double rotation_invariance_check(std::span<const Vec2> samples, double angle,
                                 double max_radius = 2.0);

}  // namespace kinlab
