#pragma once

// Tail analysis of eps = r - s. Linearizing the radial equation at eps = 0,
// beta = 1 - h^2 = 0 gives
//
//   eps' + (n - 1) eps = (n/2) beta + rho,   rho = (n/2) beta eps + O(eps^2),
//
// so phi = phi0 - int tanh(eps) stays bounded exactly when int (1 - h)
// converges.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsc/prescription.hpp"
#include "rsc/radial_ode.hpp"

namespace rsc {

enum class Boundedness { bounded, unbounded, inconclusive };

std::string_view boundedness_name(Boundedness b);

// beta_k = 1 - h(r_k)^2 on the solution grid.
std::vector<double> beta_on_grid(const RadialSolution& solution);

// |eps' + (n-1) eps - (n/2) beta| / max(|beta|, |eps|, 1e-14) per node, with
// eps' from second-order differences on the (nonuniform) grid.
std::vector<double> linearization_residual(const RadialSolution& solution);

// Max of linearization_residual over r >= r_min.
double verify_asymptotic_ode(const RadialSolution& solution, double r_min);

struct BoundednessDetail {
  Boundedness classification = Boundedness::inconclusive;
  std::vector<double> windows;       // R_k = r_probe 2^k
  std::vector<double> increments;    // int |1-h| over [R_{k-1}, R_k] ([0, R_0] first)
  std::vector<double> coefficients;  // increments / log((1+R_k)/(1+R_{k-1})), k >= 1
  double comparison_constant = 0.0;  // certified c in |1-h| >= c/(1+r) (Unbounded)
  std::string reason;
};

BoundednessDetail classify_boundedness_detail(const RadialPrescription& h, double r_probe = 5.0,
                                              double threshold = 1e-2);

inline Boundedness classify_boundedness(const RadialPrescription& h, double r_probe = 5.0,
                                        double threshold = 1e-2) {
  return classify_boundedness_detail(h, r_probe, threshold).classification;
}

struct PhiLimit {
  double estimate = 0.0;
  // Bracket on phi(r_end) - phi(r_max); r_end = infinity for the limit.
  std::array<double, 2> envelope{0.0, 0.0};
  double delta_used = 0.0;
  double measured_ratio = 0.0;  // sup |rho| / |eps| on [r_max/2, r_max]
  double r_delta = 0.0;         // first node past which |rho| < delta max(|eps|, |beta|)

  double width() const { return envelope[1] - envelope[0]; }
};

// Envelope estimate of lim phi. The slack actually used is
// min(delta, max(2 measured_ratio, 1e-8)); EnvelopeInvalid if the envelopes
// seeded at r_max/2 do not contain the computed eps(r_max).
PhiLimit estimate_phi_limit(const RadialSolution& solution, double delta = 0.1);

// Same bracket for the finite increment phi(r_end) - phi(r_max), r_end > r_max.
PhiLimit tail_bracket(const RadialSolution& solution, double delta, double r_end);

struct TailFit {
  bool skipped = false;  // eps and beta vanish on the tail
  double ratio = 0.0;    // eps / beta at r_max
  double predicted = 0.0;  // n / (2 (n - 1))
  double drift = 0.0;      // ratio(r_max) - ratio(r_max / 2)
  double s_prime_deviation = 0.0;  // max |s' - 1| on [r_max / 10, r_max]
  bool s_prime_converged = false;  // s_prime_deviation < 0.01
};

TailFit tail_exponent_fit(const RadialSolution& solution);

struct AsymptoticsReport {
  std::vector<double> beta;
  std::vector<double> eps;
  std::vector<double> linearization_residual;
  Boundedness classification = Boundedness::inconclusive;
  std::optional<double> phi_limit_estimate;
  std::array<double, 2> tail_envelope{0.0, 0.0};
  double delta_used = 0.0;
};

AsymptoticsReport analyze_asymptotics(const RadialSolution& solution, double r_probe = 5.0,
                                      double threshold = 1e-2, double delta = 0.1);

}  // namespace rsc
