#include "rsc/error.hpp"

namespace rsc {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::not_in_future_cone: return "NotInFutureCone";
    case Errc::domain_error: return "DomainError";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::singular_point: return "SingularPoint";
    case Errc::trap_violation: return "TrapViolation";
    case Errc::step_underflow: return "StepUnderflow";
    case Errc::start_inconsistent: return "StartInconsistent";
    case Errc::non_positive_prescription: return "NonPositivePrescription";
    case Errc::not_admissible: return "NotAdmissible";
    case Errc::envelope_invalid: return "EnvelopeInvalid";
    case Errc::sampler_cap_exceeded: return "SamplerCapExceeded";
    case Errc::non_positive_envelope: return "NonPositiveEnvelope";
    case Errc::margin_too_large: return "MarginTooLarge";
    case Errc::fit_budget_exceeded: return "FitBudgetExceeded";
    case Errc::not_integrable: return "NotIntegrable";
    case Errc::inversion_failed: return "InversionFailed";
    case Errc::metric_degenerate: return "MetricDegenerate";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace rsc
