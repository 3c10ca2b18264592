#include "kinlab/limits.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "kinlab/error.hpp"
#include "kinlab/quadrature.hpp"

namespace kinlab {

namespace {

constexpr double pi = std::numbers::pi;

double norm_pow(const Vec2& xi, double alpha) {
  const double r = xi.norm();
  if (r == 0.0) return 0.0;
  return alpha == 2.0 ? r * r : std::pow(r, alpha);
}

}  // namespace

double c_tilde(double alpha, double a) {
  require(alpha > 0.0 && alpha <= 2.0, ErrorCode::parameter, "c_tilde needs alpha in (0, 2]");
  require(a > 0.0, ErrorCode::parameter, "c_tilde needs a > 0");
  // Kinks of |cos|^alpha at pi/2 and 3 pi/2 go on piece boundaries.
  const double breaks[] = {0.0, pi / 2, 3 * pi / 2, 2 * pi};
  const auto r = integrate_pieces([alpha](double x) { return std::pow(std::abs(std::cos(x)), alpha); },
                                  breaks, 1e-13, 1e-13);
  return a / (2 * pi) * r.value;
}

double k_beta_alpha(double beta, double alpha) {
  require(alpha > 1.0 && alpha <= 2.0, ErrorCode::parameter, "k_beta_alpha needs alpha in (1, 2]");
  if (!(beta > 0.5 && beta <= 1.0)) {
    fail(ErrorCode::unsupported_regime, "k_beta_alpha needs beta in (1/2, 1], got " +
                                            std::to_string(beta));
  }
  return beta == 1.0 ? 1.0 / (1.0 + alpha / 2) : 2.0 / alpha;
}

Mat2 gaussian_kernel(Regime regime, double beta, double s, double t) {
  require(s > 0.0 && t > 0.0, ErrorCode::parameter, "gaussian_kernel needs s, t > 0");
  const double m = std::min(s, t);
  switch (regime) {
    case Regime::super_critical:
      return Mat2::Identity() * (m / 2);
    case Regime::critical:
      return Mat2::Identity() * (m * m / (4 * std::sqrt(s * t)));
    case Regime::sub_critical:
      return s == t ? Mat2(Mat2::Identity() * (0.5 * std::pow(s, beta))) : Mat2(Mat2::Zero());
  }
  fail(ErrorCode::law, "unknown regime");
}

double stable_marginal_cf(Regime regime, double alpha, double beta, double c_tilde, double t,
                          const Vec2& xi) {
  require(t > 0.0, ErrorCode::parameter, "stable_marginal_cf needs t > 0");
  const double base = c_tilde * norm_pow(xi, alpha);
  switch (regime) {
    case Regime::super_critical:
      return std::exp(-base * t);
    case Regime::critical:
      return std::exp(-base * t / (1 + alpha / 2));
    case Regime::sub_critical:
      return std::exp(-(2 / alpha) * base * std::pow(t, beta));
  }
  fail(ErrorCode::law, "unknown regime");
}

double stable_pair_cf(double alpha, double beta, double c_tilde, double s, double t,
                      const Vec2& xi1, const Vec2& xi2) {
  require(s > 0.0, ErrorCode::parameter, "stable_pair_cf needs s > 0");
  require(s <= t, ErrorCode::domain, "stable_pair_cf needs s <= t");
  const double k = k_beta_alpha(beta, alpha);
  if (beta < 1.0) {
    return std::exp(-k * c_tilde * std::pow(s, beta) * norm_pow(xi1, alpha)) *
           std::exp(-k * c_tilde * std::pow(t, beta) * norm_pow(xi2, alpha));
  }
  const Vec2 mixed = xi1 / std::sqrt(s) + xi2 / std::sqrt(t);
  const double n2 = norm_pow(xi2, alpha);
  const double bracket = norm_pow(mixed, alpha) * std::pow(s, 1 + alpha / 2) + n2 * t -
                         n2 * std::pow(s / t, alpha / 2) * s;
  return std::exp(-k * c_tilde * bracket);
}

double levy_pair_cf(double alpha, double c_tilde, double s, double t, const Vec2& xi1,
                    const Vec2& xi2) {
  require(s > 0.0, ErrorCode::parameter, "levy_pair_cf needs s > 0");
  require(s <= t, ErrorCode::domain, "levy_pair_cf needs s <= t");
  return std::exp(-c_tilde * (norm_pow(xi1 + xi2, alpha) * s + norm_pow(xi2, alpha) * (t - s)));
}

std::function<double(const Vec2&)> corollary_cf(Regime regime, const NoiseSpec& noise) {
  noise.validate();
  const double c = c_tilde(noise.alpha, noise.a);
  const double alpha = noise.alpha;
  // At t = 1 the beta-dependence of the sub-critical exponent drops out.
  return [=](const Vec2& xi) { return stable_marginal_cf(regime, alpha, 1.0, c, 1.0, xi); };
}

Mat2 LimitLaw::kernel(double s, double t) const {
  if (family != LawFamily::gaussian) fail(ErrorCode::law, "stable limits have no covariance kernel");
  return gaussian_kernel(regime.regime, beta, s, t);
}

double LimitLaw::cf(double t, const Vec2& xi) const {
  if (family == LawFamily::gaussian) {
    return std::exp(-0.5 * xi.dot(kernel(t, t) * xi));
  }
  return stable_marginal_cf(regime.regime, alpha, beta, c_tilde, t, xi);
}

double LimitLaw::pair_cf(double s, double t, const Vec2& xi1, const Vec2& xi2) const {
  require(s > 0.0, ErrorCode::parameter, "pair_cf needs s > 0");
  require(s <= t, ErrorCode::domain, "pair_cf needs s <= t");
  if (family == LawFamily::gaussian) {
    const double q = xi1.dot(kernel(s, s) * xi1) + 2 * xi1.dot(kernel(s, t) * xi2) +
                     xi2.dot(kernel(t, t) * xi2);
    return std::exp(-0.5 * q);
  }
  if (regime.regime == Regime::super_critical) return levy_pair_cf(alpha, c_tilde, s, t, xi1, xi2);
  return stable_pair_cf(alpha, beta, c_tilde, s, t, xi1, xi2);
}

LimitLaw make_limit_law(const NoiseSpec& noise, double beta, double gamma) {
  noise.validate();
  LimitLaw law;
  law.regime = classify(noise.alpha, beta, gamma);
  law.family = noise.is_brownian() ? LawFamily::gaussian : LawFamily::stable;
  law.alpha = noise.alpha;
  law.beta = beta;
  law.c_tilde = c_tilde(noise.alpha, noise.a);
  if (!noise.is_brownian()) {
    require(gamma > 0.0 && gamma < noise.alpha, ErrorCode::unsupported_regime,
            "stable limits need gamma in (0, alpha)");
  }
  if (law.regime.regime != Regime::super_critical) {
    require(gamma == 1.0 && beta > 0.5 && beta <= 1.0, ErrorCode::unsupported_regime,
            std::string(to_string(law.regime.regime)) +
                " limit is only known for gamma = 1 and beta in (1/2, 1]");
  }
  return law;
}

GaussianLimitSample sample_gaussian_limit(const LimitLaw& law, std::span<const double> times,
                                          std::size_t n, std::uint64_t master_seed) {
  require(!times.empty(), ErrorCode::parameter, "sample_gaussian_limit needs at least one time");
  require(n >= 1, ErrorCode::parameter, "sample_gaussian_limit needs n >= 1");
  const auto m = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd cov(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      cov.block<2, 2>(2 * i, 2 * j) = law.kernel(times[i], times[j]);
    }
  }

  GaussianLimitSample out;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const double scale = std::max(1.0, cov.diagonal().maxCoeff());
  for (double jitter = 1e-14 * scale; llt.info() != Eigen::Success; jitter *= 10) {
    if (jitter > 1e-6 * scale) {
      fail(ErrorCode::numeric, "Cholesky factorization failed even with diagonal jitter " +
                                   std::to_string(jitter / 10));
    }
    llt.compute(cov + jitter * Eigen::MatrixXd::Identity(2 * m, 2 * m));
    out.jitter = jitter;
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  MarginalEnsemble& ens = out.ensemble;
  ens.obs_times.assign(times.begin(), times.end());
  ens.meta.params.noise = NoiseSpec::brownian();
  ens.meta.params.beta = law.beta;
  ens.meta.dt = 0.0;
  ens.meta.master_seed = master_seed;
  ens.meta.n_paths = n;
  ens.meta.requested_times = ens.obs_times;
  ens.samples.assign(times.size(), std::vector<Vec2>(n));
  Eigen::VectorXd g(2 * m);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(master_seed, i, stream_purpose::gaussian_limit);
    for (Eigen::Index k = 0; k < 2 * m; ++k) g[k] = rng.normal();
    const Eigen::VectorXd y = chol * g;
    for (Eigen::Index j = 0; j < m; ++j) ens.samples[j][i] = y.segment<2>(2 * j);
  }
  return out;
}

}  // namespace kinlab
