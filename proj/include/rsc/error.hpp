#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsc {

enum class Errc {
  not_in_future_cone,
  domain_error,
  out_of_range,
  singular_point,
  trap_violation,
  step_underflow,
  start_inconsistent,
  non_positive_prescription,
  not_admissible,
  envelope_invalid,
  sampler_cap_exceeded,
  non_positive_envelope,
  margin_too_large,
  fit_budget_exceeded,
  not_integrable,
  inversion_failed,
  metric_degenerate,
  config_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rsc
