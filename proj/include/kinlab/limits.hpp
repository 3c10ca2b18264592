#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "kinlab/kinetic_sim.hpp"
#include "kinlab/noise.hpp"
#include "kinlab/rescale.hpp"
#include "kinlab/types.hpp"

namespace kinlab {

/// (a / 2 pi) * int_0^{2 pi} |cos x|^alpha dx by adaptive quadrature (abs. error <= 1e-10).
double c_tilde(double alpha, double a);

/// (1 + alpha/2)^{-1} for beta = 1, 2/alpha for beta in (1/2, 1).
double k_beta_alpha(double beta, double alpha);

/// Covariance kernel of the Brownian limit. Each component is independent,
/// so the kernel is a multiple of the identity.
Mat2 gaussian_kernel(Regime regime, double beta, double s, double t);

/// CF of the stable limit at time t (depends on xi only through its norm).
double stable_marginal_cf(Regime regime, double alpha, double beta, double c_tilde, double t,
                          const Vec2& xi);

/// Joint CF of the (critical or sub-critical) stable limit at times s <= t.
double stable_pair_cf(double alpha, double beta, double c_tilde, double s, double t,
                      const Vec2& xi1, const Vec2& xi2);

/// Joint CF at s <= t of the super-critical limit, a rotation-invariant Levy
/// process with exponent -c_tilde ||xi||^alpha.
double levy_pair_cf(double alpha, double c_tilde, double s, double t, const Vec2& xi1,
                    const Vec2& xi2);

/// Limit CF of eps^{rate} (X, V) at time 1/eps as eps -> 0. For alpha = 2 this
/// is the CF of N(0, I/2) (super/sub-critical) or N(0, I/4) (critical).
std::function<double(const Vec2&)> corollary_cf(Regime regime, const NoiseSpec& noise);

enum class LawFamily { gaussian, stable };

struct LimitLaw {
  LawFamily family = LawFamily::gaussian;
  RegimeInfo regime;
  double alpha = 2.0;
  double beta = 0.0;
  double c_tilde = 0.25;

  /// Gaussian family only; throws a law error otherwise.
  Mat2 kernel(double s, double t) const;
  double cf(double t, const Vec2& xi) const;
  /// Joint CF of (Y_s, Y_t), s <= t.
  double pair_cf(double s, double t, const Vec2& xi1, const Vec2& xi2) const;
};

/// Limit law of Y^{(eps)} for the given system. Critical and sub-critical
/// limits are only known for gamma = 1 and beta in (1/2, 1]; other inputs in
/// those regimes raise an unsupported-regime error.
LimitLaw make_limit_law(const NoiseSpec& noise, double beta, double gamma);

struct GaussianLimitSample {
  MarginalEnsemble ensemble;
  double jitter = 0.0;  ///< diagonal shift that was needed for the Cholesky factor
};

/// Exact samples of the Gaussian limit at the given times (block covariance
/// from the kernel). Sample i uses RandomStream(master_seed, i, gaussian_limit).
GaussianLimitSample sample_gaussian_limit(const LimitLaw& law, std::span<const double> times,
                                          std::size_t n, std::uint64_t master_seed);

}  // namespace kinlab
