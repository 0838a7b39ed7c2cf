#pragma once

// Radial barriers for a direction-dependent prescription: sup/inf envelopes
// over spheres, positive parts, eps0 margins, smoothing, flattening at the
// pole, and the two normalized radial solutions phi- <= phi <= phi+.

#include <array>
#include <cstddef>
#include <vector>

#include "rsc/asymptotics.hpp"
#include "rsc/prescription.hpp"
#include "rsc/radial_ode.hpp"

namespace rsc {

// Deterministic low-discrepancy unit directions in R^n: a shifted Halton
// sequence mapped through the inverse normal CDF. Prefixes are nested.
std::vector<std::vector<double>> sphere_directions(int n, std::size_t count);

struct EnvelopePair {
  // h_minus(r) = sampled sup over the sphere of radius r, h_plus(r) = inf.
  RadialPrescription h_minus;
  RadialPrescription h_plus;
  std::vector<double> r_grid;
  std::size_t sphere_nodes = 0;
};

// Starts from 2 n^2 directions and doubles until a doubling pass moves the
// sampled sup and inf by < 1e-3 on r_grid; SamplerCapExceeded past cap.
EnvelopePair radial_envelopes(const DirectionalPrescription& h, const std::vector<double>& r_grid,
                              std::size_t cap = 1 << 14);

// 1 + (h_minus - 1)_+ and 1 - (1 - h_plus)_+; NonPositiveEnvelope if the
// latter is <= 0 on r_grid.
EnvelopePair positive_part_normalize(const EnvelopePair& pair);

// h_minus + eps0 min(1, r^-2), h_plus - eps0 min(1, r^-2); MarginTooLarge
// unless eps0 < inf h_plus on r_grid.
EnvelopePair add_margins(const EnvelopePair& pair, double eps0);

double margin(double eps0, double r);

// theta = 1 on |x| <= 1/4, 0 on |x| >= 3/4, C-infinity, theta(x) + theta(x-1) = 1.
double blend_theta(double x);

// Cubic least-squares approximants on unit windows i = 0..extent blended by
// theta(r - i); beyond extent the input is used unchanged. Each window meets
// eps0 / (i+1)^2 on its support [i - 3/4, i + 3/4] (fit over [i-1, i+1],
// refit over the support alone once, then FitBudgetExceeded).
RadialPrescription smooth_blend(const RadialPrescription& input, double eps0, int extent);

// max over dense samples of |smoothed - input| / min(eps0, eps0 / r^2) on [0, r_max].
double smoothing_error_ratio(const RadialPrescription& smoothed, const RadialPrescription& input,
                             double eps0, double r_max, std::size_t samples = 10000);

enum class FlattenMode { sup, inf };

// theta(r) S + (1 - theta(r)) g with S the sup (inf) of g; constant on [0, 1/4].
RadialPrescription flatten_near_zero(const RadialPrescription& g, FlattenMode mode, double extent);

struct BarrierOptions {
  double r_max = 40.0;
  double grid_spacing = 1.0 / 16.0;
  double delta = 0.1;
  std::size_t sampler_cap = 1 << 14;
  std::size_t check_points = 10000;
};

struct BarrierCheck {
  std::size_t points = 0;
  double min_upper_slack = 0.0;  // min g-(r(x)) - h(x)
  double min_lower_slack = 0.0;  // min h(x) - g+(r(x))
  bool holds() const { return min_upper_slack >= 0.0 && min_lower_slack >= 0.0; }
};

struct BarrierPair {
  int dimension = 0;
  double eps0 = 0.0;
  std::size_t sphere_nodes = 0;
  EnvelopePair raw;       // sampled envelopes
  EnvelopePair widened;   // positive parts plus margins (smoothing input)
  RadialPrescription smoothed_minus, smoothed_plus;  // before flattening
  RadialPrescription g_minus, g_plus;
  RadialSolution phi_minus, phi_plus;  // normalized to vanish at infinity
  std::array<double, 2> normalization_constants{0.0, 0.0};
  PhiLimit limit_minus, limit_plus;  // brackets for the unnormalized limits
  BarrierCheck check;
  std::array<Boundedness, 2> classification{Boundedness::inconclusive,
                                             Boundedness::inconclusive};
};

// eps0 <= 0 selects min(0.05, inf h_plus' / 2).
BarrierPair build_barrier_pair(const DirectionalPrescription& h, double eps0, double tol,
                               const BarrierOptions& options = {});

// Samples points of H with r in [0, r_max] and checks g- >= h >= g+.
BarrierCheck check_barrier_inequalities(const DirectionalPrescription& h,
                                        const RadialPrescription& g_minus,
                                        const RadialPrescription& g_plus, double r_max,
                                        std::size_t points, unsigned seed = 7);

// Max over nodes of (phi_minus - phi, phi - phi_plus); <= 0 means pinched.
double pinching_violation(const BarrierPair& pair, const RadialSolution& direct);

// phi0 chosen so that the limit estimate at infinity is 0.
RadialSolution normalize_at_infinity(const RadialSolution& solution, double delta,
                                     PhiLimit* limit = nullptr);

}  // namespace rsc
