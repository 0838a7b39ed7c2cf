#include "rsc/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dopri5.hpp"
#include "rsc/error.hpp"

namespace rsc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double simpson_refine(const F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth, double& err) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
}

// Simpson on [a, b] with one midpoint, refined only while the local
// estimate exceeds tol.
template <class F>
double simpson(const F& f, double a, double b, double fa, double fb, double tol, double& err) {
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_refine(f, a, b, fa, fm, fb, whole, tol, 20, err);
}

void check_trap(int n, double r, double s, double h) {
  const double ratio = sinh_ratio(s, r);
  const double lhs = (n - 2) * ratio * ratio;
  const double rhs = n * h * h;
  if (lhs > rhs * (1.0 + 1e-9) + 1e-12) {
    std::ostringstream msg;
    msg << "(n-2) sinh^2 s > n h^2 sinh^2 r at r = " << r << ", s = " << s;
    throw Error(Errc::trap_violation, msg.str());
  }
}

}  // namespace

double sinh_ratio(double r, double s) {
  if (r == s) return 1.0;
  return std::exp(r - s) * (std::expm1(-2.0 * r) / std::expm1(-2.0 * s));
}

double ode_rhs(double r, double s, const RadialPrescription& h) {
  if (!(r > 0.0) || !(s > 0.0)) {
    throw Error(Errc::singular_point, "radial equation is singular at r = 0 or s <= 0");
  }
  const int n = h.dimension();
  const double hr = h(r);
  const double q = sinh_ratio(r, s);
  return (n * hr * hr * q - (n - 2) / q) / (2.0 * std::cosh(r - s));
}

double ode_second(double r, double s, double s_prime, const RadialPrescription& h) {
  if (!(r > 0.0) || !(s > 0.0)) {
    throw Error(Errc::singular_point, "radial equation is singular at r = 0 or s <= 0");
  }
  const int n = h.dimension();
  const double hr = h(r);
  // Five-point stencil for h', kept inside r > 0.
  const double d = std::min(1e-3 * std::max(1.0, r), 0.25 * r);
  const double dh = (h(r - 2 * d) - 8 * h(r - d) + 8 * h(r + d) - h(r + 2 * d)) / (12 * d);
  const double q = sinh_ratio(r, s);
  const double c = std::cosh(r - s);
  const double sh = std::sinh(r - s);
  const double coth_r = 1.0 / std::tanh(r);
  const double coth_s = 1.0 / std::tanh(s);
  const double num_r = 2 * n * hr * dh * q + n * hr * hr * q * coth_r + (n - 2) * coth_r / q;
  const double num_s = -n * hr * hr * q * coth_s - (n - 2) * coth_s / q;
  const double f_r = num_r / (2 * c) - s_prime * sh / c;
  const double f_s = num_s / (2 * c) + s_prime * sh / c;
  return f_r + f_s * s_prime;
}

SeriesStart series_start(const RadialPrescription& h, double r0) {
  if (!(r0 > 0.0) || r0 > 1e-3) throw Error(Errc::domain_error, "series start needs 0 < r0 <= 1e-3");
  const double h0 = h(0.0);
  SeriesStart out{h0 * r0, h0, 0.0};
  out.residual = std::abs(ode_rhs(r0, out.s0, h) - out.s0_prime);
  // O(r0^2) for h flat at 0; O(r0) otherwise through h(r0) - h(0).
  const double allowance = 10.0 * (r0 * r0 + std::abs(h(r0) - h0) + 1e-14) *
                           std::max(1.0, h0 * h0) * h.dimension();
  if (out.residual > allowance) {
    std::ostringstream msg;
    msg << "series start residual " << out.residual << " exceeds " << allowance;
    throw Error(Errc::start_inconsistent, msg.str());
  }
  return out;
}

const DenseSegment& RadialSolution::segment_for(double r) const {
  const double slack = 1e-12 * std::max(1.0, r_max());
  if (!(r >= 0.0) || r > r_max() + slack) {
    std::ostringstream msg;
    msg << "r = " << r << " outside solution range [0, " << r_max() << "]";
    throw Error(Errc::out_of_range, msg.str());
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double v, const DenseSegment& seg) { return v < seg.r0; });
  if (it == segments_.begin()) return segments_.front();
  return *(it - 1);
}

double RadialSolution::s_at(double r) const { return segment_for(r).value(r); }

double RadialSolution::s_prime_at(double r) const { return segment_for(r).derivative(r); }

double RadialSolution::eps_at(double r) const { return r - s_at(r); }

double RadialSolution::tail_integral(double a, double b) const {
  auto integrand = [this](double u) { return std::tanh(eps_at(u)); };
  double err = 0.0;
  return simpson(integrand, a, b, integrand(a), integrand(b),
                 std::max(tol_, 1e-15) * (b - a), err);
}

double RadialSolution::phi_at(double r) const {
  if (!has_phi()) throw Error(Errc::domain_error, "phi not populated; run phi_quadrature");
  segment_for(r);
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t k = static_cast<std::size_t>(std::distance(r_.begin(), it)) - 1;
  if (r == r_[k]) return phi_[k];
  return phi_[k] - tail_integral(r_[k], r);
}

RadialSolution RadialSolution::corrupted_copy(std::size_t k, double ds) const {
  RadialSolution out = *this;
  out.s_.at(k) += ds;
  out.eps_.at(k) = out.r_[k] - out.s_[k];
  return out;
}

RadialSolution integrate_s(const RadialPrescription& h, double r_max, double tol,
                           const IntegrateOptions& options) {
  if (!(r_max > 0.0)) throw Error(Errc::domain_error, "r_max must be positive");
  if (!(tol > 0.0)) throw Error(Errc::domain_error, "tol must be positive");

  RadialSolution sol;
  sol.prescription_ = std::make_shared<const RadialPrescription>(h);
  sol.tol_ = tol;
  const int n = h.dimension();
  if (!h.flat_near_zero()) {
    sol.warnings_.push_back(h.name() +
                            " is not flagged constant near r = 0; the start uses h(0) only");
  }

  // The first-order start leaves an O(h'(0) r0) defect near the pole; tying
  // r0 to tol keeps it below the integration error.
  const double r0 = std::min({options.start_radius, tol, r_max / 100.0});
  const SeriesStart start = series_start(h, r0);
  const double s0 = options.start_scale * start.s0;

  auto rhs = [&h](double r, double s) {
    if (!(r > 0.0) || !(s > 0.0)) return kNaN;
    return ode_rhs(r, s, h);
  };
  auto second = [&h](double r, double s, double sp) { return ode_second(r, s, sp, h); };
  auto on_accept = [&h, n](double r, double s) {
    if (!(s > 0.0)) throw Error(Errc::trap_violation, "s left (0, inf)");
    check_trap(n, r, s, h(r));
  };

  detail::Dopri5Settings settings;
  settings.tol = tol;
  settings.initial_step = 0.1 * r0;
  settings.max_step = options.max_step;
  settings.min_step = std::min(1e-13, 1e-3 * r0);
  detail::Dopri5Result main_run = detail::dopri5(rhs, r0, s0, r_max, settings, second, on_accept);

  // Richardson-style check of the first-order start: restart ten times closer
  // to the pole and compare at r = 0.01.
  constexpr double probe = 0.01;
  if (options.refine_start_check && options.start_scale == 1.0 && r_max >= 2.0 * probe) {
    const double r0b = r0 / 10.0;
    detail::Dopri5Settings fine = settings;
    fine.initial_step = 0.1 * r0b;
    fine.min_step = std::min(1e-13, 1e-3 * r0b);
    const detail::Dopri5Result check =
        detail::dopri5(rhs, r0b, series_start(h, r0b).s0, probe, fine, second);
    const double ref = check.segments.back().value(probe);
    auto it = std::upper_bound(main_run.segments.begin(), main_run.segments.end(), probe,
                               [](double v, const DenseSegment& seg) { return v < seg.r0; });
    const double val = (it - 1)->value(probe);
    sol.start_discrepancy_ = std::abs(val - ref);
    if (sol.start_discrepancy_ > 10.0 * tol) {
      std::ostringstream msg;
      msg << "start refinement disagrees by " << sol.start_discrepancy_ << " at r = " << probe;
      throw Error(Errc::start_inconsistent, msg.str());
    }
  }

  DenseSegment lead;
  lead.r0 = 0.0;
  lead.h = r0;
  lead.y1 = s0;
  lead.d0 = s0 / r0;
  lead.d1 = s0 / r0;
  sol.segments_.reserve(main_run.segments.size() + 1);
  sol.segments_.push_back(lead);
  sol.segments_.insert(sol.segments_.end(), main_run.segments.begin(), main_run.segments.end());
  sol.tolerance_achieved_ = std::max(main_run.max_local_error, sol.start_discrepancy_);

  sol.r_.push_back(0.0);
  sol.s_.push_back(0.0);
  sol.s_prime_.push_back(s0 / r0);
  for (const DenseSegment& seg : sol.segments_) {
    const int pieces =
        2 * std::max(1, static_cast<int>(std::ceil(seg.h / (2.0 * options.max_spacing))));
    for (int j = 1; j <= pieces; ++j) {
      const double rr = j == pieces ? seg.end() : seg.r0 + j * seg.h / pieces;
      sol.r_.push_back(rr);
      sol.s_.push_back(j == pieces ? seg.y1 : seg.value(rr));
      sol.s_prime_.push_back(seg.derivative(rr));
    }
  }

  sol.eps_.resize(sol.r_.size());
  for (std::size_t k = 0; k < sol.r_.size(); ++k) {
    sol.eps_[k] = sol.r_[k] - sol.s_[k];
    if (!std::isfinite(sol.eps_[k])) throw Error(Errc::trap_violation, "non-finite eps");
    if (k > 0 && sol.s_[k] - sol.s_[k - 1] < -1e-12) {
      throw Error(Errc::trap_violation, "s decreased between output nodes");
    }
    if (sol.s_prime_[k] < -1e-9) throw Error(Errc::trap_violation, "s' < 0 at an output node");
  }
  return sol;
}

RadialSolution phi_quadrature(RadialSolution solution, double phi0) {
  solution.phi0_ = phi0;
  const auto& r = solution.r_;
  solution.phi_.assign(r.size(), phi0);
  auto integrand = [&solution](double u) { return std::tanh(solution.eps_at(u)); };
  double err = 0.0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double a = r[k];
    const double b = r[k + 1];
    const double piece = simpson(integrand, a, b, std::tanh(solution.eps_[k]),
                                 std::tanh(solution.eps_[k + 1]), solution.tol_ * (b - a), err);
    solution.phi_[k + 1] = solution.phi_[k] - piece;
  }
  solution.quadrature_error_ = err;
  return solution;
}

std::array<double, 2> radial_curvatures(double r, double s, double s_prime, double f) {
  const double scale = std::exp(-f);
  return {scale * std::cosh(r - s) * s_prime, scale * sinh_ratio(s, r)};
}

double radial_curvature_from_f(double f, double f_prime, double f_second) {
  const double g = 1.0 - f_prime * f_prime;
  return std::exp(-f) / std::sqrt(g) * (f_second / g + 1.0);
}

namespace {

CurvatureSpectrum spectrum_from(int n, double kr, double kt) {
  std::vector<double> kappas(static_cast<std::size_t>(n), kt);
  kappas[0] = kr;
  return CurvatureSpectrum::from_kappas(std::move(kappas), 2);
}

}  // namespace

CurvatureSpectrum curvatures_at(const RadialSolution& solution, double r) {
  if (!solution.has_phi()) throw Error(Errc::domain_error, "phi not populated");
  if (!(r >= 0.0) || r > solution.r_max()) {
    throw Error(Errc::out_of_range, "curvatures requested outside the solution grid");
  }
  const int n = solution.dimension();
  if (r == 0.0) {
    const double k = std::exp(-solution.phi0()) * solution.h_at(0.0);
    return spectrum_from(n, k, k);
  }
  const auto [kr, kt] =
      radial_curvatures(r, solution.s_at(r), solution.s_prime_at(r), solution.phi_at(r));
  return spectrum_from(n, kr, kt);
}

CurvatureSpectrum node_curvatures(const RadialSolution& solution, std::size_t k) {
  if (!solution.has_phi()) throw Error(Errc::domain_error, "phi not populated");
  const int n = solution.dimension();
  const double r = solution.r().at(k);
  const double phi = solution.phi()[k];
  if (r == 0.0) {
    const double kk = std::exp(-phi) * solution.h_at(0.0);
    return spectrum_from(n, kk, kk);
  }
  const auto [kr, kt] = radial_curvatures(r, solution.s()[k], solution.s_prime()[k], phi);
  return spectrum_from(n, kr, kt);
}

double f2_value(const RadialSolution& solution, std::size_t k) {
  const int n = solution.dimension();
  const double r = solution.r()[k];
  const double phi = solution.phi()[k];
  const CurvatureSpectrum spec = node_curvatures(solution, k);
  const double sigma2 = spec.sigma(2);
  if (!(sigma2 > 0.0)) {
    std::ostringstream msg;
    msg << "sigma_2 = " << sigma2 << " at r = " << r;
    throw Error(Errc::not_admissible, msg.str());
  }
  return std::exp(phi) * std::sqrt(sigma2 / binomial(n, 2));
}

std::vector<double> f2_residual(const RadialSolution& solution) {
  if (!solution.has_phi()) throw Error(Errc::domain_error, "phi not populated");
  std::vector<double> out(solution.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::abs(f2_value(solution, k) - solution.h_at(solution.r()[k]));
  }
  return out;
}

double overlap_consistency(const RadialPrescription& h, const std::vector<double>& radii,
                           double tol) {
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw Error(Errc::domain_error, "radii must increase");
  }
  std::vector<RadialSolution> runs;
  runs.reserve(radii.size());
  for (double rm : radii) runs.push_back(integrate_s(h, rm, tol));
  double worst = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      for (std::size_t k = 0; k < runs[i].size(); ++k) {
        worst = std::max(worst, std::abs(runs[i].s()[k] - runs[j].s_at(runs[i].r()[k])));
      }
    }
  }
  return worst;
}

}  // namespace rsc
