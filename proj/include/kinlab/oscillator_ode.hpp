#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "kinlab/types.hpp"

namespace kinlab {

/// Decay envelope of solutions to x'' + x'/t^beta + x = 0:
/// 1/sqrt(t) for beta = 1, exp(-t^{1-beta} / (2(1-beta))) otherwise.
/// Defined for beta > 1/2.
double rate_f(double t, double beta);
double log_rate_f(double t, double beta);
/// d/dt log f(t).
double log_rate_f_derivative(double t, double beta);

/// Potential h in the deframed equation u'' + (1 + h) u = 0, u = y / f.
double deframed_potential(double t, double beta);
/// Integral of h over [t, +inf).
double deframed_potential_tail(double t, double beta);

/// Fundamental system of x'' + x'/t^beta + x = 0 on a uniform grid.
///
/// The basis starts from the identity in deframed coordinates, so
/// det(resolvent) / f^2 is identically 1 up to integration error.
struct OdeSolution {
  double beta = 1.0;
  double t0 = 1.0;
  std::vector<double> times;
  std::vector<Mat2> resolvent;  ///< [[y1, y2], [y1', y2']]
  std::vector<double> wronskian;

  std::size_t index_of(double t) const;
};

OdeSolution integrate_deframed(double beta, double t0, double t_end, double tol = 1e-9,
                               double grid_step = 0.05);

/// Result of fitting a constant change of basis on a tail window.
struct Canonicalization {
  Mat2 M = Mat2::Identity();
  double residual = 0.0;  ///< RMS Frobenius misfit over the window
};

/// Fits M so that R_t M ~ f(t) e^{tA} on fit_window. The target carries the
/// first-order averaged phase drift -1/2 int_t^inf h, which otherwise leaks
/// into M when the expansion error decays slowly (beta close to 1/2).
Canonicalization canonicalize_basis(const OdeSolution& sol, Interval fit_window);

/// ||f(t)^{-1} R_t M - e^{tA}|| (spectral norm) at a grid time.
double asymptotic_error(const OdeSolution& sol, const Mat2& M, double t);

/// max_t |w(t) / f(t)^2 - 1| over the grid.
double max_wronskian_deviation(const OdeSolution& sol);

/// Log-log slope of asymptotic_error over the grid points inside range.
double expansion_slope(const OdeSolution& sol, const Mat2& M, Interval range);

/// CSV with columns t,y1,y2,dy1,dy2,w,f.
void write_csv(const OdeSolution& sol, std::ostream& out);

}  // namespace kinlab
