#include "kinlab/stats.hpp"

#include <cmath>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

double regression_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::input,
          "regression needs two equally sized series with at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, ErrorCode::input, "regression abscissae are all equal");
  return sxy / sxx;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0, ErrorCode::input, "log-log regression needs positive abscissae");
    lx[i] = std::log(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(y[i] > 0.0, ErrorCode::input, "log-log regression needs positive values");
    ly[i] = std::log(y[i]);
  }
  return regression_slope(lx, ly);
}

}  // namespace kinlab
