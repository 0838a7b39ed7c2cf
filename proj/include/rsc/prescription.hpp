#pragma once

// Curvature data h. A RadialPrescription is h as a function of the hyperbolic
// radius r; a DirectionalPrescription is h as a function of x in H.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rsc/lorentz.hpp"

namespace rsc {

enum class PrescriptionKind { closed_form, tabulated };

class RadialPrescription {
 public:
  RadialPrescription(int dimension, std::function<double(double)> h, std::string name,
                     bool flat_near_zero = false, double limit_at_infinity = 1.0);

  // Monotone (PCHIP) interpolation of samples; r must start at 0 and increase
  // strictly. Beyond the last sample the last value is held.
  static RadialPrescription tabulated(int dimension, std::vector<double> r, std::vector<double> h,
                                      std::string name, bool flat_near_zero = false,
                                      double limit_at_infinity = 1.0);

  // Throws NonPositivePrescription if h(r) <= 0 or r < 0.
  double operator()(double r) const;
  // Unchecked evaluation, for diagnostics that must see non-positive values.
  double raw(double r) const { return h_(r); }

  int dimension() const { return dimension_; }
  PrescriptionKind kind() const { return kind_; }
  bool flat_near_zero() const { return flat_near_zero_; }
  double limit_at_infinity() const { return limit_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& table_r() const { return table_r_; }
  const std::vector<double>& table_h() const { return table_h_; }

  RadialPrescription with_dimension(int dimension) const;

 private:
  int dimension_;
  std::function<double(double)> h_;
  std::string name_;
  bool flat_near_zero_;
  double limit_;
  PrescriptionKind kind_ = PrescriptionKind::closed_form;
  std::vector<double> table_r_;
  std::vector<double> table_h_;
};

class DirectionalPrescription {
 public:
  DirectionalPrescription(int dimension, std::function<double(const HyperbolicPoint&)> h,
                          std::string name);

  static DirectionalPrescription from_radial(const RadialPrescription& radial);

  // Throws NonPositivePrescription if h(x) <= 0.
  double operator()(const HyperbolicPoint& x) const;
  int dimension() const { return dimension_; }
  const std::string& name() const { return name_; }

 private:
  int dimension_;
  std::function<double(const HyperbolicPoint&)> h_;
  std::string name_;
};

// Built-in families.
namespace families {

RadialPrescription constant(int n, double value);
// h = 1 - c (1+r)^{-p}
RadialPrescription power_deficit(int n, double c, double p);
// h = 1 + c (1+r)^{-p}
RadialPrescription power_excess(int n, double c, double p);
// h = 1 - c (1+r)^{-1} log(e+r)^{-q}
RadialPrescription bertrand(int n, double c, double q);
// h = 1 + a(r) x_1 / cosh r with a(r) = a0 (1+r)^{-p}.
DirectionalPrescription directional(int n, double a0, double p);
// Closed-form sup / inf of the directional family over the sphere of radius r:
// 1 +/- a(r) tanh r.
double directional_sup(double a0, double p, double r);
double directional_inf(double a0, double p, double r);
// The rotationally symmetric member h = 1 + a(r) tanh r (the family's value
// along +e_1, i.e. its upper envelope).
RadialPrescription directional_radial_member(int n, double a0, double p);

}  // namespace families

}  // namespace rsc
