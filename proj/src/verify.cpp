#include "kinlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kinlab/error.hpp"
#include "kinlab/oscillator_ode.hpp"
#include "kinlab/quadrature.hpp"
#include "kinlab/random.hpp"
#include "parallel.hpp"

namespace kinlab {

namespace {

constexpr double pi = std::numbers::pi;

double cf_std_error(std::complex<double> value, std::size_t n) {
  if (n < 2) return 0.0;
  // Sample variance of exp(i xi.y) is n/(n-1) (1 - |mean|^2).
  return std::sqrt(std::max(0.0, 1.0 - std::norm(value)) / static_cast<double>(n - 1));
}

void require_same_grid(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  require(a.size() == b.size(), ErrorCode::input, "CF grids have different sizes");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i] == b[i], ErrorCode::input, "CF grids have different xi points");
  }
}

Vec2 mean_of(std::span<const Vec2> samples) {
  Vec2 m = Vec2::Zero();
  for (const Vec2& y : samples) m += y;
  return m / static_cast<double>(samples.size());
}

}  // namespace

double CfGrid::max_std_error() const {
  return std_errors.empty() ? 0.0 : *std::max_element(std_errors.begin(), std_errors.end());
}

std::vector<Vec2> standard_xi_grid(double max_radius, int directions, int radii) {
  require(max_radius > 0.0 && directions >= 1 && radii >= 1, ErrorCode::parameter,
          "xi grid needs a positive radius and at least one direction and radius");
  std::vector<Vec2> grid;
  grid.reserve(static_cast<std::size_t>(directions * radii));
  for (int d = 0; d < directions; ++d) {
    const double angle = 2 * pi * d / directions;
    for (int k = 1; k <= radii; ++k) {
      const double r = max_radius * k / radii;
      grid.emplace_back(r * std::cos(angle), r * std::sin(angle));
    }
  }
  return grid;
}

double standard_xi_radius(double alpha) { return alpha < 2.0 ? 2.0 : 3.0; }

CfGrid empirical_cf(std::span<const Vec2> samples, std::span<const Vec2> xi_points) {
  require(!samples.empty(), ErrorCode::input, "empirical_cf needs samples");
  CfGrid grid;
  grid.xi_points.assign(xi_points.begin(), xi_points.end());
  const auto n = static_cast<double>(samples.size());
  for (const Vec2& xi : xi_points) {
    double re = 0.0;
    double im = 0.0;
    for (const Vec2& y : samples) {
      const double phase = xi.dot(y);
      re += std::cos(phase);
      im += std::sin(phase);
    }
    const std::complex<double> value(re / n, im / n);
    grid.values.push_back(value);
    grid.std_errors.push_back(xi.isZero() ? 0.0 : cf_std_error(value, samples.size()));
  }
  return grid;
}

double cf_sup_distance(const CfGrid& emp, const std::function<double(const Vec2&)>& target) {
  require(emp.values.size() == emp.xi_points.size(), ErrorCode::input,
          "CF grid values do not match its xi points");
  double sup = 0.0;
  for (std::size_t i = 0; i < emp.values.size(); ++i) {
    sup = std::max(sup, std::abs(emp.values[i] - target(emp.xi_points[i])));
  }
  return sup;
}

double cf_sup_distance(const CfGrid& emp, const LimitLaw& law, double t) {
  return cf_sup_distance(emp, [&](const Vec2& xi) { return law.cf(t, xi); });
}

double cf_sup_distance(const CfGrid& a, const CfGrid& b) {
  require_same_grid(a.xi_points, b.xi_points);
  require(a.values.size() == b.values.size(), ErrorCode::input, "CF grids have different sizes");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
  return sup;
}

PairCfGrid empirical_pair_cf(std::span<const Vec2> at_s, std::span<const Vec2> at_t,
                             std::span<const Vec2> xi1, std::span<const Vec2> xi2) {
  require(!at_s.empty(), ErrorCode::input, "empirical_pair_cf needs samples");
  require(at_s.size() == at_t.size(), ErrorCode::input, "pair samples differ in size");
  PairCfGrid grid;
  grid.xi1.assign(xi1.begin(), xi1.end());
  grid.xi2.assign(xi2.begin(), xi2.end());
  const auto n = static_cast<double>(at_s.size());
  for (const Vec2& a : xi1) {
    for (const Vec2& b : xi2) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t k = 0; k < at_s.size(); ++k) {
        const double phase = a.dot(at_s[k]) + b.dot(at_t[k]);
        re += std::cos(phase);
        im += std::sin(phase);
      }
      const std::complex<double> value(re / n, im / n);
      grid.values.push_back(value);
      grid.std_errors.push_back(cf_std_error(value, at_s.size()));
    }
  }
  return grid;
}

double pair_factorization_gap(std::span<const Vec2> at_s, std::span<const Vec2> at_t,
                              std::span<const Vec2> xi1, std::span<const Vec2> xi2) {
  const PairCfGrid joint = empirical_pair_cf(at_s, at_t, xi1, xi2);
  const CfGrid ms = empirical_cf(at_s, xi1);
  const CfGrid mt = empirical_cf(at_t, xi2);
  double sup = 0.0;
  for (std::size_t i = 0; i < xi1.size(); ++i) {
    for (std::size_t j = 0; j < xi2.size(); ++j) {
      sup = std::max(sup, std::abs(joint.values[i * xi2.size() + j] - ms.values[i] * mt.values[j]));
    }
  }
  return sup;
}

double pair_cf_sup_distance(const PairCfGrid& emp, const LimitLaw& law, double s, double t) {
  require(emp.values.size() == emp.xi1.size() * emp.xi2.size(), ErrorCode::input,
          "pair CF grid values do not match its xi points");
  double sup = 0.0;
  for (std::size_t i = 0; i < emp.xi1.size(); ++i) {
    for (std::size_t j = 0; j < emp.xi2.size(); ++j) {
      const double target = law.pair_cf(s, t, emp.xi1[i], emp.xi2[j]);
      sup = std::max(sup, std::abs(emp.values[i * emp.xi2.size() + j] - target));
    }
  }
  return sup;
}

Mat2 empirical_cov(std::span<const Vec2> samples) { return empirical_cross_cov(samples, samples); }

Mat2 empirical_cross_cov(std::span<const Vec2> a, std::span<const Vec2> b) {
  require(a.size() >= 2, ErrorCode::input, "covariance needs at least two samples");
  require(a.size() == b.size(), ErrorCode::input, "cross-covariance inputs differ in size");
  const Vec2 ma = mean_of(a);
  const Vec2 mb = mean_of(b);
  Mat2 c = Mat2::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma) * (b[i] - mb).transpose();
  c /= static_cast<double>(a.size() - 1);
  if (a.data() == b.data()) c(1, 0) = c(0, 1);
  return c;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& reference_cdf) {
  require(!samples.empty(), ErrorCode::input, "ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    const double x = samples[i];
    std::size_t j = i;
    while (j < samples.size() && samples[j] == x) ++j;
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    const double left = reference_cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    sup = std::max({sup, std::abs(at - reference_cdf(x)), std::abs(below - left)});
    i = j;
  }
  return sup;
}

double normal_cdf(double x, double sigma) {
  require(sigma > 0.0, ErrorCode::parameter, "normal_cdf needs sigma > 0");
  return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
}

double ks_critical_value(std::size_t n) {
  require(n >= 1, ErrorCode::parameter, "ks_critical_value needs n >= 1");
  return 1.63 / std::sqrt(static_cast<double>(n));
}

double GFunction::log_value(double t) const {
  switch (kind) {
    case Kind::power:
      return r * std::log(t);
    case Kind::stretched_exp:
      return r * std::pow(t, 1 - beta);
  }
  fail(ErrorCode::parameter, "unknown g kind");
}

double PeriodicH::operator()(double t) const {
  switch (kind) {
    case Kind::cos2: {
      const double c = std::cos(t);
      return c * c;
    }
    case Kind::sin2: {
      const double s = std::sin(t);
      return s * s;
    }
    case Kind::sin_cos:
      return std::sin(t) * std::cos(t);
    case Kind::abs_cos_pow:
      return std::pow(std::abs(std::cos(t)), alpha);
    case Kind::one:
      return 1.0;
  }
  fail(ErrorCode::parameter, "unknown h kind");
}

double PeriodicH::mean() const {
  switch (kind) {
    case Kind::cos2:
    case Kind::sin2:
      return 0.5;
    case Kind::sin_cos:
      return 0.0;
    case Kind::abs_cos_pow:
      return c_tilde(alpha, 1.0);
    case Kind::one:
      return 1.0;
  }
  fail(ErrorCode::parameter, "unknown h kind");
}

std::vector<double> averaging_check(const GFunction& g, const PeriodicH& h,
                                    std::span<const double> t_grid, double t0) {
  require(t0 > 0.0, ErrorCode::parameter, "averaging_check needs t0 > 0");
  const double h_bar = h.mean();
  std::vector<double> ratios;
  for (const double t : t_grid) {
    require(t > t0, ErrorCode::parameter, "averaging_check needs grid times above t0");
    // Zeros of cos as breakpoints keep the kinks of |cos|^alpha on piece ends.
    std::vector<double> breaks{t0};
    for (double b = pi / 2 + pi * std::ceil((t0 - pi / 2) / pi); b < t; b += pi) {
      if (b > breaks.back()) breaks.push_back(b);
    }
    breaks.push_back(t);
    // Normalizing by g(t) keeps stretched exponentials finite.
    const double log_gt = g.log_value(t);
    const auto weight = [&](double u) { return std::exp(g.log_value(u) - log_gt); };
    const double num = integrate_pieces([&](double u) { return weight(u) * h(u); }, breaks).value;
    const double den = integrate_pieces(weight, breaks).value;
    ratios.push_back(h_bar == 0.0 ? num / den : num / (h_bar * den));
  }
  return ratios;
}

IntegralAsymptotics integral_asymptotic_check(double beta, double alpha,
                                              std::span<const double> eps_grid, double t,
                                              double t0) {
  const double k = k_beta_alpha(beta, alpha);
  require(t > 0.0 && t0 > 0.0, ErrorCode::parameter, "integral_asymptotic_check needs t, t0 > 0");
  IntegralAsymptotics out;
  for (const double eps : eps_grid) {
    require(eps > 0.0, ErrorCode::parameter, "eps must be positive");
    const double T = t / eps;
    require(T > t0, ErrorCode::parameter, "t/eps must exceed t0");
    const double log_fT = log_rate_f(T, beta);
    // f(u)^{-alpha} / f(T)^{-alpha}, evaluated in the log domain.
    const auto scaled = [&](double u) { return std::exp(-alpha * (log_rate_f(u, beta) - log_fT)); };
    std::vector<double> breaks;
    const int pieces = 256;
    for (int i = 0; i <= pieces; ++i) breaks.push_back(t0 + (T - t0) * i / pieces);
    breaks.back() = T;
    const double lhs = integrate_pieces(scaled, breaks, 1e-14, 1e-12).value;
    const double lhs2 =
        integrate_pieces([&](double u) { return scaled(u) * std::pow(u, 1 - 2 * beta); }, breaks,
                         1e-14, 1e-12)
            .value;
    const double ratio = lhs / (k * std::pow(T, beta));
    const double bounded = lhs2 / std::pow(eps, beta - 1);
    if (!std::isfinite(ratio) || !std::isfinite(bounded)) {
      fail(ErrorCode::numeric, "integral_asymptotic_check produced a non-finite ratio at eps = " +
                                   std::to_string(eps));
    }
    out.ratios.push_back(ratio);
    out.boundedness.push_back(bounded);
  }
  return out;
}

OscillationResult oscillation_check(double eps, double s, double t, std::size_t n_paths,
                                    double dt, std::uint64_t master_seed, double t0,
                                    unsigned threads) {
  require(eps > 0.0 && dt > 0.0 && t0 > 0.0, ErrorCode::parameter,
          "oscillation_check needs eps, dt, t0 > 0");
  require(eps * t0 <= s && s < t, ErrorCode::parameter, "oscillation_check needs eps t0 <= s < t");
  require(n_paths >= 2, ErrorCode::parameter, "oscillation_check needs at least two paths");

  const double S = s / eps;
  const double T = t / eps;
  // Intervals [r_k, r_k + h_k): uniform steps, restarted at S so it is a grid point.
  std::vector<double> left;
  std::vector<double> len;
  const auto append_range = [&](double from, double to) {
    const auto steps = static_cast<std::size_t>(std::ceil((to - from) / dt - 1e-9));
    for (std::size_t k = 0; k < steps; ++k) {
      const double r = from + dt * static_cast<double>(k);
      left.push_back(r);
      len.push_back(k + 1 == steps ? to - r : dt);
    }
  };
  append_range(t0, S);
  const std::size_t n_s = left.size();
  append_range(S, T);
  const std::size_t n_t = left.size();
  require(n_s >= 1, ErrorCode::parameter, "s/eps must exceed t0");

  const double root_eps = std::sqrt(eps);
  std::vector<double> ws(n_s);
  std::vector<double> wt(n_t);
  double grid_exact = 0.0;
  for (std::size_t k = 0; k < n_t; ++k) {
    const double root_h = std::sqrt(len[k]);
    wt[k] = root_eps * std::sin(T - left[k]) * root_h;
    if (k < n_s) {
      ws[k] = root_eps * std::sin(S - left[k]) * root_h;
      grid_exact += ws[k] * wt[k];
    }
  }

  std::vector<double> is(n_paths);
  std::vector<double> it(n_paths);
  detail::parallel_chunks(n_paths, threads, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RandomStream rng(master_seed, p, stream_purpose::oscillation);
      double a = 0.0;
      double b = 0.0;
      for (std::size_t k = 0; k < n_s; ++k) {
        const double z = rng.normal();
        a += ws[k] * z;
        b += wt[k] * z;
      }
      for (std::size_t k = n_s; k < n_t; ++k) b += wt[k] * rng.normal();
      is[p] = a;
      it[p] = b;
    }
  });

  const auto n = static_cast<double>(n_paths);
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    ma += is[p];
    mb += it[p];
  }
  ma /= n;
  mb /= n;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    const double prod = (is[p] - ma) * (it[p] - mb);
    sum += prod;
    sum_sq += prod * prod;
  }
  OscillationResult out;
  out.empirical = sum / (n - 1);
  const double mean_prod = sum / n;
  out.std_error = std::sqrt(std::max(0.0, sum_sq / n - mean_prod * mean_prod) / (n - 1));
  out.predicted = 0.5 * s * std::cos((t - s) / eps);
  out.grid_exact = grid_exact;
  return out;
}

double rotation_invariance_check(std::span<const Vec2> samples, double angle, double max_radius) {
  require(!samples.empty(), ErrorCode::input, "rotation_invariance_check needs samples");
  const Mat2 R = rotation(angle);
  std::vector<Vec2> rotated;
  rotated.reserve(samples.size());
  for (const Vec2& y : samples) rotated.push_back(R * y);
  const auto grid = standard_xi_grid(max_radius);
  return cf_sup_distance(empirical_cf(samples, grid), empirical_cf(rotated, grid));
}

}  // namespace kinlab
