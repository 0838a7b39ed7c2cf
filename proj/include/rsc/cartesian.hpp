#pragma once

// Independent finite-difference oracle: a radial solution written as a
// spacelike graph X_{n+1} = u(X') over a lattice, with the curvatures of the
// graph computed from centered differences of u.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rsc/lorentz.hpp"
#include "rsc/prescription.hpp"
#include "rsc/radial_ode.hpp"

namespace rsc {

class CartesianPatch {
 public:
  // Lattice lo + k spacing, k = 0..points-1, in each of n axes.
  CartesianPatch(int n, double lo, double spacing, std::size_t points, std::vector<double> u);

  int dimension() const { return n_; }
  double lo() const { return lo_; }
  double spacing() const { return spacing_; }
  std::size_t points_per_axis() const { return points_; }
  std::size_t size() const { return u_.size(); }
  const std::vector<double>& u() const { return u_; }

  std::vector<std::size_t> index_of(std::size_t flat) const;
  std::size_t flat_of(std::span<const std::size_t> index) const;
  std::vector<double> position(std::size_t flat) const;
  bool interior(std::size_t flat) const;
  std::vector<std::size_t> interior_nodes() const;

  // Centered first and second differences at an interior node.
  std::vector<double> gradient(std::size_t flat) const;
  std::vector<double> hessian(std::size_t flat) const;  // row-major n x n

 private:
  int n_;
  double lo_;
  double spacing_;
  std::size_t points_;
  std::vector<double> u_;
  std::vector<std::size_t> stride_;
};

// Patch of a closed-form graph on [lo, hi]^n.
CartesianPatch patch_from_function(int n, double lo, double hi, double spacing,
                                   const std::function<double(std::span<const double>)>& u);

// Inverts |X'| = e^{phi(r)} sinh r per node and sets u = e^{phi(r)} cosh r.
CartesianPatch to_cartesian(const RadialSolution& solution, double lo, double hi, double spacing);

// Radius r of the point of the radial graph above |X'| = rho.
double invert_radial_map(const RadialSolution& solution, double rho);

// C(n,2) / (X_{n+1}^2 - |X'|^2) h(X / sqrt(X_{n+1}^2 - |X'|^2))^2.
double big_h(const SpacetimePoint& x, const DirectionalPrescription& h);

// Eigenvalues of g^{-1/2} b g^{-1/2} with g = I - Du Du^T and
// b = D^2 u / sqrt(1 - |Du|^2); the unit hyperboloid gives kappa = 1.
CurvatureSpectrum discrete_shape_operator(const CartesianPatch& patch, std::size_t flat);

// |sigma_2(kappa) - big_h| / big_h per interior node (ordered as interior_nodes()).
std::vector<double> h2_residual_field(const CartesianPatch& patch, const DirectionalPrescription& h);

bool hyperboloid_bounds_check(const CartesianPatch& patch, double phi_min, double phi_max);

struct Admissibility {
  double fraction = 0.0;        // interior nodes with kappa in Gamma_2
  double worst_sigma2 = 0.0;    // min sigma_2 over interior nodes
  std::size_t nodes = 0;
};

Admissibility admissibility_field(const CartesianPatch& patch);

// (X', u) -> (lambda X', lambda u).
CartesianPatch dilate(const CartesianPatch& patch, double lambda);

struct PatchResiduals {
  double spacing = 0.0;
  double max_residual = 0.0;
  double rms_residual = 0.0;
  double admissible_fraction = 0.0;
  double worst_sigma2_margin = 0.0;
  std::size_t nodes = 0;
};

PatchResiduals summarize_patch(const CartesianPatch& patch, const DirectionalPrescription& h);

}  // namespace rsc
