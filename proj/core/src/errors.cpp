#include "ineqforge/errors.hpp"

namespace ineqforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::non_integrable: return "NonIntegrable";
    case ErrorCode::tail_mass_too_large: return "TailMassTooLarge";
    case ErrorCode::singular_origin: return "SingularOrigin";
    case ErrorCode::no_witness_found: return "NoWitnessFound";
    case ErrorCode::unbounded_below: return "UnboundedBelow";
    case ErrorCode::xi_diverges: return "XiDiverges";
    case ErrorCode::not_invertible: return "NotInvertible";
    case ErrorCode::case_premise_unchecked: return "CasePremiseUnchecked";
    case ErrorCode::solver_failure: return "SolverFailure";
    case ErrorCode::mode_mismatch: return "ModeMismatch";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ineqforge
