#include "kinlab/oscillator_ode.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "kinlab/error.hpp"
#include "kinlab/rescale.hpp"
#include "kinlab/stats.hpp"

namespace kinlab {

namespace {

void require_beta(double beta) {
  require(beta > 0.5, ErrorCode::unsupported_regime,
          "the resolvent expansion needs beta > 1/2, got " + std::to_string(beta));
}

using OdeState = std::array<double, 4>;  // u1, u1', u2, u2'

/// Maps a resolvent R_t back to deframed coordinates U_t = [[u1,u2],[u1',u2']].
Mat2 deframe(const Mat2& resolvent, double t, double beta) {
  const double f = rate_f(t, beta);
  const double dlog = log_rate_f_derivative(t, beta);
  Mat2 u = resolvent / f;
  u.row(1) -= dlog * u.row(0);
  return u;
}

}  // namespace

double log_rate_f(double t, double beta) {
  require_beta(beta);
  require(t > 0.0, ErrorCode::parameter, "rate_f needs t > 0");
  if (beta == 1.0) return -0.5 * std::log(t);
  return -std::pow(t, 1.0 - beta) / (2.0 * (1.0 - beta));
}

double rate_f(double t, double beta) { return std::exp(log_rate_f(t, beta)); }

double log_rate_f_derivative(double t, double beta) {
  require_beta(beta);
  return -0.5 * std::pow(t, -beta);
}

double deframed_potential(double t, double beta) {
  // h = (log f)'' - ((log f)')^2, the same expression for beta = 1.
  return 0.5 * beta * std::pow(t, -beta - 1.0) - 0.25 * std::pow(t, -2.0 * beta);
}

double deframed_potential_tail(double t, double beta) {
  require_beta(beta);
  return 0.5 * std::pow(t, -beta) - std::pow(t, 1.0 - 2.0 * beta) / (4.0 * (2.0 * beta - 1.0));
}

std::size_t OdeSolution::index_of(double t) const {
  if (times.empty()) fail(ErrorCode::lookup, "empty ODE solution");
  const double step = times.size() > 1 ? times[1] - times[0] : 1.0;
  const double pos = std::round((t - times.front()) / step);
  if (pos >= 0.0 && pos < static_cast<double>(times.size())) {
    const auto i = static_cast<std::size_t>(pos);
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  fail(ErrorCode::lookup, "time " + std::to_string(t) + " is not on the ODE grid");
}

OdeSolution integrate_deframed(double beta, double t0, double t_end, double tol,
                               double grid_step) {
  require_beta(beta);
  require(t0 > 0.0 && t_end > t0, ErrorCode::parameter, "need t_end > t0 > 0");
  require(tol > 0.0 && grid_step > 0.0, ErrorCode::parameter,
          "tolerance and grid step must be positive");

  OdeSolution sol;
  sol.beta = beta;
  sol.t0 = t0;
  const auto n = static_cast<std::size_t>(std::ceil((t_end - t0) / grid_step - 1e-9));
  sol.times.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) sol.times.push_back(t0 + static_cast<double>(i) * grid_step);
  sol.times.push_back(t_end);
  sol.resolvent.reserve(sol.times.size());
  sol.wronskian.reserve(sol.times.size());

  auto rhs = [beta](const OdeState& x, OdeState& dx, double t) {
    const double k = 1.0 + deframed_potential(t, beta);
    dx[0] = x[1];
    dx[1] = -k * x[0];
    dx[2] = x[3];
    dx[3] = -k * x[2];
  };
  auto record = [&sol, beta](const OdeState& x, double t) {
    const double f = rate_f(t, beta);
    const double dlog = log_rate_f_derivative(t, beta);
    Mat2 r;
    r << f * x[0], f * x[2], f * (dlog * x[0] + x[1]), f * (dlog * x[2] + x[3]);
    sol.resolvent.push_back(r);
    sol.wronskian.push_back(r.determinant());
  };

  namespace odeint = boost::numeric::odeint;
  OdeState state{1.0, 0.0, 0.0, 1.0};
  try {
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<OdeState>());
    odeint::integrate_times(stepper, rhs, state, sol.times.begin(), sol.times.end(),
                            std::min(grid_step, 0.01), record);
  } catch (const std::exception& e) {
    fail(ErrorCode::integration, std::string("ODE integration failed: ") + e.what());
  }
  if (sol.resolvent.size() != sol.times.size()) {
    fail(ErrorCode::integration, "ODE integration stopped before t_end");
  }
  for (const auto& r : sol.resolvent) {
    if (!r.allFinite()) fail(ErrorCode::integration, "ODE integration produced non-finite values");
  }
  return sol;
}

Canonicalization canonicalize_basis(const OdeSolution& sol, Interval fit_window) {
  const double earliest = std::max(sol.t0, 20.0);
  if (fit_window.lo < earliest || fit_window.hi <= fit_window.lo) {
    fail(ErrorCode::canonicalization, "fit window must lie in the tail (t >= max(t0, 20))");
  }
  Mat2 normal = Mat2::Zero();
  Mat2 rhs = Mat2::Zero();
  std::size_t used = 0;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double t = sol.times[i];
    if (t < fit_window.lo || t > fit_window.hi) continue;
    const Mat2 u = deframe(sol.resolvent[i], t, sol.beta);
    const Mat2 target = rotation(0.5 * deframed_potential_tail(t, sol.beta) - t);
    normal += u.transpose() * u;
    rhs += u.transpose() * target;
    ++used;
  }
  // At least one full period of samples, otherwise the fit is degenerate.
  if (used < 8 || fit_window.hi - fit_window.lo < 6.0) {
    fail(ErrorCode::canonicalization, "fit window too short for a stable fit");
  }
  const Eigen::JacobiSVD<Mat2> svd(normal);
  const double cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!std::isfinite(cond) || cond > 1e10) {
    fail(ErrorCode::canonicalization, "singular canonicalization fit");
  }
  Canonicalization out;
  out.M = normal.inverse() * rhs;
  double misfit = 0.0;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double t = sol.times[i];
    if (t < fit_window.lo || t > fit_window.hi) continue;
    const Mat2 u = deframe(sol.resolvent[i], t, sol.beta);
    const Mat2 target = rotation(0.5 * deframed_potential_tail(t, sol.beta) - t);
    misfit += (u * out.M - target).squaredNorm();
  }
  out.residual = std::sqrt(misfit / static_cast<double>(used));
  return out;
}

double asymptotic_error(const OdeSolution& sol, const Mat2& M, double t) {
  const std::size_t i = sol.index_of(t);
  const Mat2 scaled = sol.resolvent[i] / rate_f(sol.times[i], sol.beta);
  return operator_norm(scaled * M - free_flow(sol.times[i]));
}

double max_wronskian_deviation(const OdeSolution& sol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double f = rate_f(sol.times[i], sol.beta);
    worst = std::max(worst, std::abs(sol.wronskian[i] / (f * f) - 1.0));
  }
  return worst;
}

double expansion_slope(const OdeSolution& sol, const Mat2& M, Interval range) {
  std::vector<double> ts, errs;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double t = sol.times[i];
    if (t < range.lo || t > range.hi) continue;
    ts.push_back(t);
    errs.push_back(asymptotic_error(sol, M, t));
  }
  return loglog_slope(ts, errs);
}

void write_csv(const OdeSolution& sol, std::ostream& out) {
  out << "t,y1,y2,dy1,dy2,w,f\n";
  char line[256];
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const Mat2& r = sol.resolvent[i];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", sol.times[i],
                  r(0, 0), r(0, 1), r(1, 0), r(1, 1), sol.wronskian[i],
                  rate_f(sol.times[i], sol.beta));
    out << line;
  }
}

}  // namespace kinlab
