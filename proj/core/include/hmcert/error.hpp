#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmcert {

enum class ErrorCode {
  not_closed,
  self_intersecting,
  too_few_samples,
  invalid_spec,
  unwrap_failure,
  not_monotone,
  wrong_period_increment,
  invalid_params,
  tail_not_decaying,
  outside_domain,
  quadrature_not_converged,
  cross_check_failed,
  dini_violation,
  convexity_contradiction,
  not_a_diffeomorphism,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_closed: return "NotClosed";
    case ErrorCode::self_intersecting: return "SelfIntersecting";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::unwrap_failure: return "UnwrapFailure";
    case ErrorCode::not_monotone: return "NotMonotone";
    case ErrorCode::wrong_period_increment: return "WrongPeriodIncrement";
    case ErrorCode::invalid_params: return "InvalidParams";
    case ErrorCode::tail_not_decaying: return "TailNotDecaying";
    case ErrorCode::outside_domain: return "OutsideDomain";
    case ErrorCode::quadrature_not_converged: return "QuadratureNotConverged";
    case ErrorCode::cross_check_failed: return "CrossCheckFailed";
    case ErrorCode::dini_violation: return "DiniViolation";
    case ErrorCode::convexity_contradiction: return "ConvexityContradiction";
    case ErrorCode::not_a_diffeomorphism: return "NotADiffeomorphism";
  }
  return "Unknown";
}

}  // namespace hmcert
