#include "rsc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rsc/error.hpp"

namespace rsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> derivative_on_grid(const std::vector<double>& r, const std::vector<double>& f) {
  const std::size_t m = r.size();
  std::vector<double> d(m, 0.0);
  if (m < 3) {
    if (m == 2) d[0] = d[1] = (f[1] - f[0]) / (r[1] - r[0]);
    return d;
  }
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double h1 = r[k] - r[k - 1];
    const double h2 = r[k + 1] - r[k];
    d[k] = -h2 / (h1 * (h1 + h2)) * f[k - 1] + (h2 - h1) / (h1 * h2) * f[k] +
           h1 / (h2 * (h1 + h2)) * f[k + 1];
  }
  {
    const double h1 = r[1] - r[0];
    const double h2 = r[2] - r[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h2 = r[m - 1] - r[m - 2];
    const double h1 = r[m - 2] - r[m - 3];
    d[m - 1] = (2 * h2 + h1) / (h2 * (h1 + h2)) * f[m - 1] - (h1 + h2) / (h1 * h2) * f[m - 2] +
               h2 / (h1 * (h1 + h2)) * f[m - 3];
  }
  return d;
}

double beta_at(const RadialPrescription& h, double r) {
  const double v = h(r);
  return (1.0 - v) * (1.0 + v);
}

template <class F>
double gk_integral(const F& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
  if (!std::isfinite(value)) throw Error(Errc::not_integrable, "quadrature returned non-finite");
  return value;
}

// int_a^b beta, with b = infinity handled by exp-sinh.
double beta_integral(const RadialPrescription& h, double a, double b) {
  auto f = [&h](double u) { return beta_at(h, u); };
  if (std::isfinite(b)) return gk_integral(f, a, b);
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(f, a, kInf, 1e-12, &err, &l1);
  if (!std::isfinite(value) || err > 1e-6 * std::max(1.0, l1)) {
    std::ostringstream msg;
    msg << "int_" << a << "^inf (1 - h^2) did not converge (error " << err << ")";
    throw Error(Errc::not_integrable, msg.str());
  }
  return value;
}

// Solution of e' + a e = (n/2) beta, e(r0) = e0, evaluated at r1.
double envelope_value(const RadialPrescription& h, int n, double a, double r0, double e0,
                      double r1) {
  auto f = [&](double u) { return std::exp(-a * (r1 - u)) * beta_at(h, u); };
  return e0 * std::exp(-a * (r1 - r0)) + 0.5 * n * gk_integral(f, r0, r1);
}

// int_{r0}^{r1} e over the same envelope (Fubini on the integrating factor).
double envelope_integral(const RadialPrescription& h, int n, double a, double r0, double e0,
                         double r1) {
  const double b = beta_integral(h, r0, r1);
  const double e_end = std::isfinite(r1) ? envelope_value(h, n, a, r0, e0, r1) : 0.0;
  return (e0 - e_end + 0.5 * n * b) / a;
}

std::vector<double> remainder_on_grid(const RadialSolution& sol, const std::vector<double>& beta) {
  const int n = sol.dimension();
  std::vector<double> rho(sol.size());
  for (std::size_t k = 0; k < sol.size(); ++k) {
    rho[k] = (1.0 - sol.s_prime()[k]) + (n - 1) * sol.eps()[k] - 0.5 * n * beta[k];
  }
  return rho;
}

std::size_t first_node_at_or_after(const RadialSolution& sol, double r) {
  const auto& grid = sol.r();
  return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), r) - grid.begin());
}

}  // namespace

std::string_view boundedness_name(Boundedness b) {
  switch (b) {
    case Boundedness::bounded:
      return "Bounded";
    case Boundedness::unbounded:
      return "Unbounded";
    case Boundedness::inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<double> beta_on_grid(const RadialSolution& solution) {
  std::vector<double> beta(solution.size());
  for (std::size_t k = 0; k < solution.size(); ++k) {
    beta[k] = beta_at(solution.prescription(), solution.r()[k]);
  }
  return beta;
}

std::vector<double> linearization_residual(const RadialSolution& solution) {
  const int n = solution.dimension();
  const auto beta = beta_on_grid(solution);
  const auto& eps = solution.eps();
  const auto deps = derivative_on_grid(solution.r(), eps);
  std::vector<double> out(solution.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double res = deps[k] + (n - 1) * eps[k] - 0.5 * n * beta[k];
    out[k] = std::abs(res) / std::max({std::abs(beta[k]), std::abs(eps[k]), 1e-14});
  }
  return out;
}

double verify_asymptotic_ode(const RadialSolution& solution, double r_min) {
  if (!(r_min < solution.r_max())) {
    throw Error(Errc::domain_error, "solution does not extend past r_min");
  }
  const auto res = linearization_residual(solution);
  double worst = 0.0;
  for (std::size_t k = first_node_at_or_after(solution, r_min); k < res.size(); ++k) {
    worst = std::max(worst, res[k]);
  }
  return worst;
}

BoundednessDetail classify_boundedness_detail(const RadialPrescription& h, double r_probe,
                                              double threshold) {
  if (!(r_probe > 0.0) || !(threshold > 0.0)) {
    throw Error(Errc::domain_error, "r_probe and threshold must be positive");
  }
  constexpr int levels = 6;
  constexpr double tau = 0.01;
  BoundednessDetail out;
  for (int k = 0; k <= levels; ++k) out.windows.push_back(r_probe * std::ldexp(1.0, k));
  const double r_far = out.windows.back();

  // One-signedness of h - 1 on the sampled tail.
  int sign = 0;
  double largest = 0.0;
  constexpr int samples = 4000;
  for (int i = 0; i <= samples; ++i) {
    const double r = r_probe * std::pow(r_far / r_probe, static_cast<double>(i) / samples);
    const double d = h.raw(r) - 1.0;
    largest = std::max(largest, std::abs(d));
    if (std::abs(d) <= 1e-15) continue;
    const int sg = d > 0 ? 1 : -1;
    if (sign == 0) sign = sg;
    if (sg != sign) {
      out.reason = "h - 1 changes sign on the sampled tail";
      return out;
    }
  }

  auto gap = [&h](double u) { return std::abs(1.0 - h.raw(u)); };
  out.increments.push_back(gk_integral(gap, 0.0, out.windows[0]));
  for (int k = 1; k <= levels; ++k) {
    const double a = out.windows[k - 1];
    const double b = out.windows[k];
    const double inc = gk_integral(gap, a, b);
    out.increments.push_back(inc);
    out.coefficients.push_back(inc / std::log((1.0 + b) / (1.0 + a)));
  }

  if (largest <= 1e-15) {
    out.classification = Boundedness::bounded;
    out.reason = "h = 1 on the sampled tail";
    return out;
  }

  const auto& c = out.coefficients;
  const std::size_t m = c.size();
  std::vector<double> ratios;
  for (std::size_t k = 1; k < m; ++k) ratios.push_back(c[k] / c[k - 1]);
  const std::size_t q = ratios.size();

  if (ratios[q - 1] >= 1.0 - tau && ratios[q - 2] >= 1.0 - tau) {
    out.classification = Boundedness::unbounded;
    out.comparison_constant = std::min(c[m - 1], c[m - 2]);
    std::ostringstream msg;
    msg << "int |1-h| over the last two windows >= " << out.comparison_constant
        << " log-window (comparison with c/(1+r))";
    out.reason = msg.str();
    return out;
  }
  const bool decaying = ratios[q - 1] <= 1.0 - tau && ratios[q - 2] <= 1.0 - tau &&
                        ratios[q - 3] <= 1.0 - tau;
  if (decaying && out.increments.back() < threshold) {
    out.classification = Boundedness::bounded;
    std::ostringstream msg;
    msg << "window increments decay (last " << out.increments.back() << " < " << threshold
        << ")";
    out.reason = msg.str();
    return out;
  }
  out.reason = "window increments neither decay below threshold nor stay harmonic";
  return out;
}

PhiLimit tail_bracket(const RadialSolution& solution, double delta, double r_end) {
  if (!solution.has_phi()) throw Error(Errc::domain_error, "phi not populated");
  if (!(delta > 0.0)) throw Error(Errc::domain_error, "delta must be positive");
  const double r_max = solution.r_max();
  if (!(r_end > r_max)) throw Error(Errc::domain_error, "r_end must exceed r_max");
  const RadialPrescription& h = solution.prescription();
  const int n = solution.dimension();
  const auto beta = beta_on_grid(solution);
  const auto rho = remainder_on_grid(solution, beta);
  const auto& eps = solution.eps();
  const double noise = 100.0 * solution.tolerance();

  PhiLimit out;
  const std::size_t half = first_node_at_or_after(solution, 0.5 * r_max);
  for (std::size_t k = half; k < solution.size(); ++k) {
    if (std::abs(eps[k]) > noise) {
      out.measured_ratio = std::max(out.measured_ratio, std::abs(rho[k]) / std::abs(eps[k]));
    }
  }
  out.delta_used = std::min(delta, std::max(2.0 * out.measured_ratio, 1e-8));
  out.r_delta = r_max;
  for (std::size_t k = solution.size(); k-- > 0;) {
    if (std::abs(rho[k]) >= delta * std::max(std::abs(eps[k]), std::abs(beta[k])) + noise) break;
    out.r_delta = solution.r()[k];
  }

  const double a_lo = n - 1 - out.delta_used;
  const double a_hi = n - 1 + out.delta_used;

  // Bracket validity on [r_max/2, r_max].
  const double r_seed = solution.r()[half];
  if (r_seed < r_max) {
    const double e1 = envelope_value(h, n, a_lo, r_seed, eps[half], r_max);
    const double e2 = envelope_value(h, n, a_hi, r_seed, eps[half], r_max);
    const double slack = noise + 1e-14;
    const double e = eps.back();
    if (e < std::min(e1, e2) - slack || e > std::max(e1, e2) + slack) {
      std::ostringstream msg;
      msg << "eps(" << r_max << ") = " << e << " outside its envelope [" << std::min(e1, e2)
          << ", " << std::max(e1, e2) << "] with delta " << out.delta_used;
      throw Error(Errc::envelope_invalid, msg.str());
    }
  }

  const double e0 = eps.back();
  const double i1 = envelope_integral(h, n, a_lo, r_max, e0, r_end);
  const double i2 = envelope_integral(h, n, a_hi, r_max, e0, r_end);
  double lo = std::min(i1, i2);
  double hi = std::max(i1, i2);

  // tanh(e) lies between e and e - e^3/3; bound |e| on the tail by the
  // envelope's stationary level.
  double beta_sup = 0.0;
  const double far = std::isfinite(r_end) ? r_end : 1e3 * r_max;
  for (int i = 0; i <= 400; ++i) {
    const double r = r_max * std::pow(far / r_max, i / 400.0);
    beta_sup = std::max(beta_sup, std::abs(beta_at(h, r)));
  }
  const double eps_sup = std::max(std::abs(e0), 0.5 * n * beta_sup / a_lo);
  const double widen = eps_sup * eps_sup * std::max(std::abs(lo), std::abs(hi)) / 3.0;
  lo -= widen;
  hi += widen;

  // phi(r_end) - phi(r_max) = -int tanh(eps).
  out.envelope = {-hi, -lo};
  out.estimate = solution.phi().back() + 0.5 * (out.envelope[0] + out.envelope[1]);
  return out;
}

PhiLimit estimate_phi_limit(const RadialSolution& solution, double delta) {
  return tail_bracket(solution, delta, kInf);
}

TailFit tail_exponent_fit(const RadialSolution& solution) {
  const int n = solution.dimension();
  const double r_max = solution.r_max();
  TailFit out;
  out.predicted = n / (2.0 * (n - 1));
  for (std::size_t k = first_node_at_or_after(solution, 0.1 * r_max); k < solution.size(); ++k) {
    out.s_prime_deviation = std::max(out.s_prime_deviation, std::abs(solution.s_prime()[k] - 1.0));
  }
  out.s_prime_converged = out.s_prime_deviation < 0.01;

  const double beta_end = beta_at(solution.prescription(), r_max);
  const double eps_end = solution.eps().back();
  const double floor = 100.0 * solution.tolerance();
  if (std::abs(beta_end) <= floor && std::abs(eps_end) <= floor) {
    out.skipped = true;
    return out;
  }
  out.ratio = eps_end / beta_end;
  const double r_half = 0.5 * r_max;
  const double ratio_half = solution.eps_at(r_half) / beta_at(solution.prescription(), r_half);
  out.drift = out.ratio - ratio_half;
  return out;
}

AsymptoticsReport analyze_asymptotics(const RadialSolution& solution, double r_probe,
                                      double threshold, double delta) {
  AsymptoticsReport out;
  out.beta = beta_on_grid(solution);
  out.eps = solution.eps();
  out.linearization_residual = linearization_residual(solution);
  out.classification = classify_boundedness(solution.prescription(), r_probe, threshold);
  if (out.classification == Boundedness::bounded && solution.has_phi()) {
    const PhiLimit limit = estimate_phi_limit(solution, delta);
    out.phi_limit_estimate = limit.estimate;
    out.tail_envelope = limit.envelope;
    out.delta_used = limit.delta_used;
  }
  return out;
}

}  // namespace rsc
