#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace suffstat {

enum class ErrorCode {
  parse,
  empty_input,
  schema,
  insufficient_rows,
  degenerate_label,
  insufficient_group,
  undefined,
  domain,
  infinite_odds,
  validation,
  shape,
  empty_evaluation,
  insufficient_curve,
  singular_design,
  zero_variance,
  insufficient_points,
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse error";
    case ErrorCode::empty_input: return "empty input";
    case ErrorCode::schema: return "schema error";
    case ErrorCode::insufficient_rows: return "insufficient rows";
    case ErrorCode::degenerate_label: return "degenerate label";
    case ErrorCode::insufficient_group: return "insufficient group";
    case ErrorCode::undefined: return "undefined statistic";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::infinite_odds: return "infinite odds";
    case ErrorCode::validation: return "validation error";
    case ErrorCode::shape: return "shape error";
    case ErrorCode::empty_evaluation: return "empty evaluation";
    case ErrorCode::insufficient_curve: return "insufficient curve";
    case ErrorCode::singular_design: return "singular design";
    case ErrorCode::zero_variance: return "zero variance";
    case ErrorCode::insufficient_points: return "insufficient points";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal notes collected while running (skipped subsets, dropped points).
using Diagnostics = std::vector<std::string>;

}  // namespace suffstat
