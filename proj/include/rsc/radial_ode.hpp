#pragma once

// Radial reduction of F_2(phi) = h. With s(r) = r + artanh(f'(r)) the
// curvature equation becomes the first-order singular ODE
//
//   2 s' cosh(r - s) sinh r sinh s = n h(r)^2 sinh^2 r - (n - 2) sinh^2 s,
//   s(0) = 0, s'(0) = h(0),
//
// and phi is recovered from phi(r) = phi0 - int_0^r tanh(u - s(u)) du.

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "rsc/lorentz.hpp"
#include "rsc/prescription.hpp"

namespace rsc {

// One accepted Dormand-Prince step, interpolated by the quintic Hermite
// polynomial through (y, y', y'') at both ends.
struct DenseSegment {
  double r0 = 0.0;
  double h = 0.0;
  double y0 = 0.0, y1 = 0.0;
  double d0 = 0.0, d1 = 0.0;
  double g0 = 0.0, g1 = 0.0;

  double value(double r) const;
  double derivative(double r) const;
  double end() const { return r0 + h; }
};

struct IntegrateOptions {
  double start_radius = 1e-6;  // capped at tol
  // Multiplies the series start s(r0) = h(0) r0; values != 1 are used for
  // perturbation studies and disable the start refinement check.
  double start_scale = 1.0;
  bool refine_start_check = true;
  double max_spacing = 0.1;
  double max_step = 1.0;
};

class RadialSolution {
 public:
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& s() const { return s_; }
  // Derivative of the continuous numerical solution; equals the ODE
  // right-hand side at accepted step nodes only.
  const std::vector<double>& s_prime() const { return s_prime_; }
  const std::vector<double>& eps() const { return eps_; }
  const std::vector<double>& phi() const { return phi_; }

  bool has_phi() const { return !phi_.empty(); }
  double phi0() const { return phi0_; }
  double tolerance() const { return tol_; }
  double tolerance_achieved() const { return tolerance_achieved_; }
  double start_discrepancy() const { return start_discrepancy_; }
  double quadrature_error() const { return quadrature_error_; }
  std::size_t accepted_steps() const { return segments_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const RadialPrescription& prescription() const { return *prescription_; }
  int dimension() const { return prescription_->dimension(); }
  double r_max() const { return r_.back(); }
  std::size_t size() const { return r_.size(); }

  double s_at(double r) const;
  double s_prime_at(double r) const;
  double eps_at(double r) const;
  double phi_at(double r) const;
  double h_at(double r) const { return (*prescription_)(r); }

  // Copy with node k of s shifted by ds (and eps updated). Used only as a
  // negative control for the invariant checkers.
  RadialSolution corrupted_copy(std::size_t k, double ds) const;

 private:
  friend RadialSolution integrate_s(const RadialPrescription&, double, double,
                                    const IntegrateOptions&);
  friend RadialSolution phi_quadrature(RadialSolution, double);

  const DenseSegment& segment_for(double r) const;
  double tail_integral(double a, double b) const;

  std::shared_ptr<const RadialPrescription> prescription_;
  std::vector<DenseSegment> segments_;
  std::vector<double> r_, s_, s_prime_, eps_, phi_;
  double phi0_ = 0.0;
  double tol_ = 0.0;
  double tolerance_achieved_ = 0.0;
  double start_discrepancy_ = 0.0;
  double quadrature_error_ = 0.0;
  std::vector<std::string> warnings_;
};

// sinh(r) / sinh(s) for r, s > 0 without overflow.
double sinh_ratio(double r, double s);

// s' from the radial equation; throws SingularPoint for r <= 0 or s <= 0.
double ode_rhs(double r, double s, const RadialPrescription& h);
// s'' along a solution through (r, s) with slope s_prime = ode_rhs(r, s).
double ode_second(double r, double s, double s_prime, const RadialPrescription& h);

struct SeriesStart {
  double s0;
  double s0_prime;
  double residual;  // |ode_rhs(r0, s0) - s0_prime|
};

SeriesStart series_start(const RadialPrescription& h, double r0);

RadialSolution integrate_s(const RadialPrescription& h, double r_max, double tol,
                           const IntegrateOptions& options = {});

RadialSolution phi_quadrature(RadialSolution solution, double phi0);

inline RadialSolution solve_radial(const RadialPrescription& h, double r_max, double tol,
                                   double phi0 = 0.0, const IntegrateOptions& options = {}) {
  return phi_quadrature(integrate_s(h, r_max, tol, options), phi0);
}

// (kappa_radial, kappa_tangential) from (f, s, s') at r > 0.
std::array<double, 2> radial_curvatures(double r, double s, double s_prime, double f);
// The same simple curvature written through f', f'': cross-check only.
double radial_curvature_from_f(double f, double f_prime, double f_second);

CurvatureSpectrum curvatures_at(const RadialSolution& solution, double r);
// Spectrum from the node values (r_k, s_k, s'_k, phi_k); kappa[0] is radial.
CurvatureSpectrum node_curvatures(const RadialSolution& solution, std::size_t k);

// e^phi sqrt(sigma_2 / C(n,2)) at node k.
double f2_value(const RadialSolution& solution, std::size_t k);
std::vector<double> f2_residual(const RadialSolution& solution);

double overlap_consistency(const RadialPrescription& h, const std::vector<double>& radii,
                           double tol);

}  // namespace rsc
