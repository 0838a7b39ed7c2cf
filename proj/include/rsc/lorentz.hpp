#pragma once

// Minkowski space R^{n,1} and the unit hyperboloid H = {|x'|^2 - x_{n+1}^2 = -1,
// x_{n+1} > 0}, plus the symmetric-function toolkit for principal curvatures.

#include <cstddef>
#include <span>
#include <vector>

namespace rsc {

struct SpacetimePoint {
  std::vector<double> spatial;  // X'
  double height = 0.0;          // X_{n+1}

  std::size_t dimension() const { return spatial.size(); }
};

// A point of H stored through its chart x' only; the height sqrt(1 + |x'|^2)
// is recomputed on demand so the hyperboloid identity cannot drift.
class HyperbolicPoint {
 public:
  explicit HyperbolicPoint(std::vector<double> chart);

  // The apex o = (0, ..., 0, 1).
  static HyperbolicPoint apex(std::size_t n);
  // (sinh r, 0, ..., 0, cosh r): distance r from the apex along the first axis.
  static HyperbolicPoint along_axis(std::size_t n, double r);

  std::span<const double> chart() const { return chart_; }
  std::size_t dimension() const { return chart_.size(); }
  double chart_norm() const;
  double height() const;
  // Hyperbolic distance from the apex, asinh |x'|.
  double radius() const;
  SpacetimePoint embed() const;

 private:
  std::vector<double> chart_;
};

double minkowski_inner(const SpacetimePoint& x, const SpacetimePoint& y);
bool in_future_cone(const SpacetimePoint& x);

struct PolarDecomposition {
  HyperbolicPoint direction;
  double rho;
};

// X = rho * x with x in H; throws NotInFutureCone outside C+.
PolarDecomposition polar_decompose(const SpacetimePoint& x);
SpacetimePoint polar_recompose(const HyperbolicPoint& x, double rho);

// arccosh(-<x, y>), evaluated through the Minkowski chord so that nearby points
// keep full relative accuracy. Arguments below 1 by at most 1e-12 are clamped.
double hyperbolic_distance(const HyperbolicPoint& x, const HyperbolicPoint& y);

double binomial(int n, int k);

// sigma_m via the prefix recurrence e_j <- e_j + kappa_i e_{j-1}.
double elementary_symmetric(std::span<const double> kappas, int m);
// sigma_1 ... sigma_m in one pass.
std::vector<double> elementary_symmetric_all(std::span<const double> kappas, int m);

bool is_admissible(std::span<const double> kappas, int m);

struct McLaurinChain {
  bool holds = false;
  // (sigma_k / C(n,k))^{1/k} for k = 1..m.
  std::vector<double> normalized_means;
};

// Throws NotAdmissible when kappas is outside Gamma_m.
McLaurinChain mclaurin_check(std::span<const double> kappas, int m);

struct CurvatureSpectrum {
  std::vector<double> kappas;
  std::vector<double> sigmas;  // sigma_1 ... sigma_m
  int admissible_up_to = 0;

  static CurvatureSpectrum from_kappas(std::vector<double> kappas, int m);
  double sigma(int k) const { return sigmas.at(static_cast<std::size_t>(k - 1)); }
};

}  // namespace rsc
