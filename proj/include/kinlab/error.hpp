#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kinlab {

enum class ErrorCode {
  parameter = 1,
  unsupported_regime,
  integration,
  canonicalization,
  lookup,
  propagation,
  domain,
  input,
  law,
  numeric,
  config,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code selects the category.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace kinlab
