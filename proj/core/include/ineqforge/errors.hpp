#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ineqforge {

enum class ErrorCode {
  invalid_argument,
  non_integrable,
  tail_mass_too_large,
  singular_origin,
  no_witness_found,
  unbounded_below,
  xi_diverges,
  not_invertible,
  case_premise_unchecked,
  solver_failure,
  mode_mismatch,
  parse_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the condition instead of the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::invalid_argument, message);
}

}  // namespace ineqforge
