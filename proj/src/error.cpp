#include "kinlab/error.hpp"

#include <cmath>

#include "kinlab/types.hpp"

namespace kinlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parameter: return "parameter error";
    case ErrorCode::unsupported_regime: return "unsupported regime";
    case ErrorCode::integration: return "integration error";
    case ErrorCode::canonicalization: return "canonicalization error";
    case ErrorCode::lookup: return "lookup error";
    case ErrorCode::propagation: return "propagation error";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::input: return "input error";
    case ErrorCode::law: return "law error";
    case ErrorCode::numeric: return "numeric error";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "io error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

double operator_norm(const Mat2& m) {
  // Largest singular value from the closed form for 2x2 matrices.
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
  return std::sqrt(0.5 * (s1 + disc));
}

}  // namespace kinlab
