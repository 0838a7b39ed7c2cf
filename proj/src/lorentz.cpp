#include "rsc/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsc/error.hpp"

namespace rsc {

namespace {

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

HyperbolicPoint::HyperbolicPoint(std::vector<double> chart) : chart_(std::move(chart)) {
  if (chart_.empty()) throw Error(Errc::domain_error, "hyperbolic point needs n >= 1");
}

HyperbolicPoint HyperbolicPoint::apex(std::size_t n) {
  return HyperbolicPoint(std::vector<double>(n, 0.0));
}

HyperbolicPoint HyperbolicPoint::along_axis(std::size_t n, double r) {
  std::vector<double> chart(n, 0.0);
  chart[0] = std::sinh(r);
  return HyperbolicPoint(std::move(chart));
}

double HyperbolicPoint::chart_norm() const { return std::sqrt(squared_norm(chart_)); }

double HyperbolicPoint::height() const { return std::sqrt(1.0 + squared_norm(chart_)); }

double HyperbolicPoint::radius() const { return std::asinh(chart_norm()); }

SpacetimePoint HyperbolicPoint::embed() const { return SpacetimePoint{chart_, height()}; }

double minkowski_inner(const SpacetimePoint& x, const SpacetimePoint& y) {
  if (x.dimension() != y.dimension()) throw Error(Errc::domain_error, "dimension mismatch");
  return std::inner_product(x.spatial.begin(), x.spatial.end(), y.spatial.begin(), 0.0) -
         x.height * y.height;
}

bool in_future_cone(const SpacetimePoint& x) {
  return x.height > std::sqrt(squared_norm(x.spatial));
}

PolarDecomposition polar_decompose(const SpacetimePoint& x) {
  const double spatial_norm = std::sqrt(squared_norm(x.spatial));
  if (!(x.height > spatial_norm)) {
    throw Error(Errc::not_in_future_cone, "X_{n+1} <= |X'|");
  }
  // Factored form avoids cancellation close to the light-cone.
  const double rho = std::sqrt((x.height - spatial_norm) * (x.height + spatial_norm));
  std::vector<double> chart(x.spatial.size());
  std::transform(x.spatial.begin(), x.spatial.end(), chart.begin(),
                 [rho](double v) { return v / rho; });
  return PolarDecomposition{HyperbolicPoint(std::move(chart)), rho};
}

SpacetimePoint polar_recompose(const HyperbolicPoint& x, double rho) {
  SpacetimePoint out;
  out.spatial.resize(x.dimension());
  std::transform(x.chart().begin(), x.chart().end(), out.spatial.begin(),
                 [rho](double v) { return rho * v; });
  out.height = rho * x.height();
  return out;
}

double hyperbolic_distance(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  if (x.dimension() != y.dimension()) throw Error(Errc::domain_error, "dimension mismatch");
  const auto xc = x.chart();
  const auto yc = y.chart();
  double chord_spatial = 0.0;
  for (std::size_t i = 0; i < xc.size(); ++i) chord_spatial += (xc[i] - yc[i]) * (xc[i] - yc[i]);
  const double dh = (squared_norm(xc) - squared_norm(yc)) / (x.height() + y.height());
  // q = -<x,y> - 1, half the Minkowski squared chord.
  double q = 0.5 * (chord_spatial - dh * dh);
  if (q < 0.0) {
    if (q < -1e-12) throw Error(Errc::domain_error, "arccosh argument below 1");
    q = 0.0;
  }
  return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

std::vector<double> elementary_symmetric_all(std::span<const double> kappas, int m) {
  const int n = static_cast<int>(kappas.size());
  if (m < 1 || m > n) throw Error(Errc::domain_error, "elementary_symmetric needs 1 <= m <= n");
  std::vector<double> e(static_cast<std::size_t>(m) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double k = kappas[static_cast<std::size_t>(i)];
    for (int j = std::min(i + 1, m); j >= 1; --j) e[j] += k * e[j - 1];
  }
  return {e.begin() + 1, e.end()};
}

double elementary_symmetric(std::span<const double> kappas, int m) {
  return elementary_symmetric_all(kappas, m).back();
}

bool is_admissible(std::span<const double> kappas, int m) {
  const auto sigmas = elementary_symmetric_all(kappas, m);
  return std::all_of(sigmas.begin(), sigmas.end(), [](double s) { return s > 0.0; });
}

McLaurinChain mclaurin_check(std::span<const double> kappas, int m) {
  const auto sigmas = elementary_symmetric_all(kappas, m);
  if (!std::all_of(sigmas.begin(), sigmas.end(), [](double s) { return s > 0.0; })) {
    throw Error(Errc::not_admissible, "McLaurin chain requested outside Gamma_m");
  }
  const int n = static_cast<int>(kappas.size());
  McLaurinChain chain;
  chain.normalized_means.reserve(sigmas.size());
  for (int k = 1; k <= m; ++k) {
    chain.normalized_means.push_back(
        std::pow(sigmas[static_cast<std::size_t>(k - 1)] / binomial(n, k), 1.0 / k));
  }
  chain.holds = true;
  for (std::size_t k = 1; k < chain.normalized_means.size(); ++k) {
    const double prev = chain.normalized_means[k - 1];
    if (chain.normalized_means[k] > prev * (1.0 + 1e-12)) chain.holds = false;
  }
  return chain;
}

CurvatureSpectrum CurvatureSpectrum::from_kappas(std::vector<double> kappas, int m) {
  CurvatureSpectrum out;
  out.sigmas = elementary_symmetric_all(kappas, m);
  out.kappas = std::move(kappas);
  while (out.admissible_up_to < m &&
         out.sigmas[static_cast<std::size_t>(out.admissible_up_to)] > 0.0) {
    ++out.admissible_up_to;
  }
  return out;
}

}  // namespace rsc
