#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "kinlab/error.hpp"
#include "kinlab/limits.hpp"
#include "kinlab/verify.hpp"
#include "support/oracles.hpp"

using namespace kinlab;

namespace {
constexpr double pi = std::numbers::pi;

const std::vector<Vec2> probe_xis{Vec2(0.3, 0.1), Vec2(-1.0, 0.5), Vec2(0.0, 2.0), Vec2(1.2, -1.1)};
}  // namespace

TEST_CASE("c_tilde against the closed form and Gauss-Legendre") {
  CHECK(c_tilde(2.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  for (const double alpha : {1.1, 1.25, 1.5, 1.8, 2.0}) {
    for (const double a : {0.5, 1.0, 2.5}) {
      const double expected = oracle::c_tilde_closed_form(alpha, a);
      CHECK(std::abs(c_tilde(alpha, a) - expected) < 1e-10);
    }
    auto f = [alpha](double x) { return std::pow(std::abs(std::cos(x)), alpha); };
    // Kink-aligned composite rule at two meshes, both within 1e-10.
    for (const int panels : {64, 128}) {
      const double gl = (oracle::gauss_legendre(f, 0, pi / 2, panels, 20) +
                         oracle::gauss_legendre(f, pi / 2, 3 * pi / 2, 2 * panels, 20) +
                         oracle::gauss_legendre(f, 3 * pi / 2, 2 * pi, panels, 20)) /
                        (2 * pi);
      CHECK(std::abs(c_tilde(alpha, 1.0) - gl) < 1e-9);
    }
  }
  CHECK_THROWS_AS(c_tilde(2.5, 1.0), Error);
  CHECK_THROWS_AS(c_tilde(1.5, 0.0), Error);
}

TEST_CASE("k_beta_alpha") {
  CHECK(k_beta_alpha(1.0, 2.0) == doctest::Approx(0.5));
  CHECK(k_beta_alpha(1.0, 1.5) == doctest::Approx(1 / 1.75));
  CHECK(k_beta_alpha(0.8, 1.5) == doctest::Approx(4.0 / 3));
  try {
    k_beta_alpha(0.5, 1.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_regime);
  }
  CHECK_THROWS_AS(k_beta_alpha(1.2, 1.5), Error);
}

TEST_CASE("Gaussian kernels") {
  CHECK(gaussian_kernel(Regime::super_critical, 2, 1, 2)(0, 0) == doctest::Approx(0.5));
  CHECK(gaussian_kernel(Regime::super_critical, 2, 1, 2)(0, 1) == 0.0);
  CHECK(gaussian_kernel(Regime::critical, 1, 1, 1)(1, 1) == doctest::Approx(0.25));
  CHECK(gaussian_kernel(Regime::critical, 1, 1, 2)(0, 0) == doctest::Approx(1 / (4 * std::sqrt(2.0))));
  CHECK(gaussian_kernel(Regime::sub_critical, 0.75, 1, 1)(0, 0) == doctest::Approx(0.5));
  CHECK(gaussian_kernel(Regime::sub_critical, 0.75, 2, 2)(0, 0) == doctest::Approx(0.5 * std::pow(2, 0.75)));
  CHECK(gaussian_kernel(Regime::sub_critical, 0.75, 1, 2).norm() == 0.0);
  CHECK_THROWS_AS(gaussian_kernel(Regime::critical, 1, 0, 1), Error);
}

TEST_CASE("critical stable exponent is the limit of the finite-eps integral") {
  // eps a int_1^{1/eps} (r eps)^{alpha/2} |cos(r + phi)|^alpha dr -> c_tilde / (1 + alpha/2).
  const double alpha = 1.5;
  const double a = 1.0;
  const double eps = 1e-3;
  const double T = 1 / eps;
  for (const double phi : {0.0, 0.7}) {
    auto f = [&](double r) { return std::pow(r * eps, alpha / 2) * std::pow(std::abs(std::cos(r + phi)), alpha); };
    const double finite = eps * a * oracle::gauss_legendre(f, 1.0, T, 20000, 20);
    const double limit = -std::log(stable_marginal_cf(Regime::critical, alpha, 1.0, c_tilde(alpha, a), 1.0, Vec2(1, 0)));
    CHECK(finite == doctest::Approx(limit).epsilon(5e-3));
  }
}

TEST_CASE("stable pair CF against a quadrature oracle") {
  const double alpha = 1.5;
  const double c = c_tilde(alpha, 1.0);
  const double s = 1.0;
  const double t = 2.0;
  SUBCASE("beta = 1: Y_t = t^{-1/2} int_0^t r^{1/2} dM_r") {
    for (const Vec2& xi1 : probe_xis) {
      for (const Vec2& xi2 : probe_xis) {
        auto early = [&](double r) {
          return std::pow((xi1 * std::sqrt(r / s) + xi2 * std::sqrt(r / t)).norm(), alpha);
        };
        auto late = [&](double r) { return std::pow(xi2.norm() * std::sqrt(r / t), alpha); };
        const double expo = c * (oracle::gauss_legendre(early, 0, s, 50, 20) +
                                 oracle::gauss_legendre(late, s, t, 50, 20));
        CHECK(stable_pair_cf(alpha, 1.0, c, s, t, xi1, xi2) == doctest::Approx(std::exp(-expo)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("beta < 1 factorizes into the marginals") {
    for (const Vec2& xi1 : probe_xis) {
      for (const Vec2& xi2 : probe_xis) {
        const double joint = stable_pair_cf(alpha, 0.8, c, s, t, xi1, xi2);
        const double prod = stable_marginal_cf(Regime::sub_critical, alpha, 0.8, c, s, xi1) *
                            stable_marginal_cf(Regime::sub_critical, alpha, 0.8, c, t, xi2);
        CHECK(joint == doctest::Approx(prod).epsilon(1e-13));
      }
    }
  }
  SUBCASE("marginals of the beta = 1 pair") {
    for (const Vec2& xi : probe_xis) {
      CHECK(stable_pair_cf(alpha, 1.0, c, s, t, xi, Vec2::Zero()) ==
            doctest::Approx(stable_marginal_cf(Regime::critical, alpha, 1.0, c, s, xi)).epsilon(1e-13));
      CHECK(stable_pair_cf(alpha, 1.0, c, s, t, Vec2::Zero(), xi) ==
            doctest::Approx(stable_marginal_cf(Regime::critical, alpha, 1.0, c, t, xi)).epsilon(1e-13));
    }
  }
  SUBCASE("Levy pair has independent stationary increments") {
    for (const Vec2& xi1 : probe_xis) {
      for (const Vec2& xi2 : probe_xis) {
        const double expected = std::exp(-c * s * std::pow((xi1 + xi2).norm(), alpha)) *
                                std::exp(-c * (t - s) * std::pow(xi2.norm(), alpha));
        CHECK(levy_pair_cf(alpha, c, s, t, xi1, xi2) == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
  SUBCASE("s > t is a domain error") {
    try {
      stable_pair_cf(alpha, 1.0, c, 2.0, 1.0, probe_xis[0], probe_xis[1]);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
  }
}

TEST_CASE("corollary CFs") {
  const Vec2 xi(1.0, 1.0);  // |xi|^2 = 2
  const auto bs = corollary_cf(Regime::super_critical, NoiseSpec::brownian());
  const auto bc = corollary_cf(Regime::critical, NoiseSpec::brownian());
  const auto bsub = corollary_cf(Regime::sub_critical, NoiseSpec::brownian());
  // N(0, I/2), N(0, I/4), N(0, I/2).
  CHECK(bs(xi) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(bc(xi) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  CHECK(bsub(xi) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  const double c = oracle::c_tilde_closed_form(1.5, 1.0);
  const auto sc = corollary_cf(Regime::critical, NoiseSpec::stable(1.5));
  CHECK(sc(xi) == doctest::Approx(std::exp(-c * std::pow(2.0, 0.75) / 1.75)).epsilon(1e-10));
}

TEST_CASE("alpha = 2 stable formulas coincide with the Gaussian laws") {
  const double c = c_tilde(2.0, 0.5);
  for (const Regime r : {Regime::super_critical, Regime::critical, Regime::sub_critical}) {
    const double beta = r == Regime::sub_critical ? 0.75 : 1.0;
    for (const Vec2& xi : probe_xis) {
      for (const double t : {0.5, 1.0, 2.0}) {
        const double gauss = std::exp(-0.5 * xi.dot(gaussian_kernel(r, beta, t, t) * xi));
        CHECK(std::abs(stable_marginal_cf(r, 2.0, beta, c, t, xi) - gauss) < 1e-12);
      }
    }
  }
  const LimitLaw crit = make_limit_law(NoiseSpec::brownian(), 1.0, 1.0);
  for (const Vec2& xi1 : probe_xis) {
    for (const Vec2& xi2 : probe_xis) {
      CHECK(std::abs(stable_pair_cf(2.0, 1.0, c, 1.0, 2.0, xi1, xi2) - crit.pair_cf(1.0, 2.0, xi1, xi2)) < 1e-12);
      CHECK(std::abs(levy_pair_cf(2.0, c, 1.0, 2.0, xi1, xi2) -
                     make_limit_law(NoiseSpec::brownian(), 2.0, 1.0).pair_cf(1.0, 2.0, xi1, xi2)) < 1e-12);
    }
  }
}

TEST_CASE("make_limit_law") {
  const LimitLaw sup = make_limit_law(NoiseSpec::stable(1.5), 1.5, 1.0);
  CHECK(sup.family == LawFamily::stable);
  CHECK(sup.regime.regime == Regime::super_critical);
  CHECK_THROWS_AS(sup.kernel(1, 1), Error);
  CHECK(make_limit_law(NoiseSpec::brownian(), 1.0, 1.0).kernel(1, 1)(0, 0) == doctest::Approx(0.25));
  for (const auto& [noise, beta, gamma] :
       {std::tuple{NoiseSpec::brownian(), 0.5, 1.0}, std::tuple{NoiseSpec::brownian(), 2.0, 3.0},
        std::tuple{NoiseSpec::stable(1.5), 1.5, 1.6}}) {
    try {
      make_limit_law(noise, beta, gamma);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::unsupported_regime);
    }
  }
}

TEST_CASE("Gaussian limit sampler") {
  const LimitLaw crit = make_limit_law(NoiseSpec::brownian(), 1.0, 1.0);
  const std::vector<double> times{1.0, 2.0};
  const auto out = sample_gaussian_limit(crit, times, 40000, 3);
  CHECK(out.jitter == 0.0);
  const Mat2 cross = empirical_cross_cov(out.ensemble.samples[0], out.ensemble.samples[1]);
  const double target = 1 / (4 * std::sqrt(2.0));
  CHECK(std::abs(cross(0, 0) - target) < 0.01);
  CHECK(std::abs(cross(0, 1)) < 0.01);

  // Duplicate times make the covariance singular; a small jitter repairs it.
  const std::vector<double> dup{1.0, 1.0};
  const auto rep = sample_gaussian_limit(crit, dup, 100, 3);
  CHECK(rep.jitter > 0.0);
  CHECK(rep.jitter <= 1e-6);
  CHECK((rep.ensemble.samples[0][7] - rep.ensemble.samples[1][7]).norm() < 1e-3);

  // Sub-critical samples at distinct times are independent.
  const LimitLaw sub = make_limit_law(NoiseSpec::brownian(), 0.75, 1.0);
  const auto s = sample_gaussian_limit(sub, times, 40000, 4);
  CHECK(empirical_cross_cov(s.ensemble.samples[0], s.ensemble.samples[1]).cwiseAbs().maxCoeff() < 0.015);
  CHECK(empirical_cov(s.ensemble.samples[1])(1, 1) == doctest::Approx(0.5 * std::pow(2.0, 0.75)).epsilon(0.03));
}
