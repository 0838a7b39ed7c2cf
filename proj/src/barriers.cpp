#include "rsc/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>

#include "rsc/error.hpp"

namespace rsc {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Past this radius |x'|^2 = sinh^2 r nears overflow; the envelopes continue with a
// power law fitted on [r_far / 2, r_far].
constexpr double kRFar = 300.0;

double radical_inverse(std::size_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

using Directions = std::vector<std::vector<double>>;

// sup (sign = +1) or inf (sign = -1) of h over the sampled sphere of radius r.
double sphere_extreme(const DirectionalPrescription& h, const Directions& dirs, double r,
                      int sign) {
  const std::size_t n = static_cast<std::size_t>(h.dimension());
  if (r == 0.0) return h(HyperbolicPoint::apex(n));
  const double sr = std::sinh(r);
  double best = sign > 0 ? -HUGE_VAL : HUGE_VAL;
  std::vector<double> chart(n);
  for (const auto& w : dirs) {
    for (std::size_t j = 0; j < n; ++j) chart[j] = sr * w[j];
    const double v = h(HyperbolicPoint(chart));
    best = sign > 0 ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

RadialPrescription sampled_envelope(const DirectionalPrescription& h,
                                    std::shared_ptr<const Directions> dirs, int sign) {
  const double v_half = sphere_extreme(h, *dirs, 0.5 * kRFar, sign);
  const double v_far = sphere_extreme(h, *dirs, kRFar, sign);
  const double d_half = v_half - 1.0;
  const double d_far = v_far - 1.0;
  double power = 0.0;
  if (d_half != 0.0 && d_far != 0.0 && d_half * d_far > 0.0) {
    power = std::log(d_half / d_far) / std::log((1.0 + kRFar) / (1.0 + 0.5 * kRFar));
  }
  auto fn = [h, dirs, sign, d_far, power](double r) {
    if (r <= kRFar) return sphere_extreme(h, *dirs, r, sign);
    return 1.0 + d_far * std::pow((1.0 + kRFar) / (1.0 + r), power);
  };
  return RadialPrescription(h.dimension(), fn,
                            std::string(sign > 0 ? "sup" : "inf") + "-envelope(" + h.name() + ")");
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

struct Cubic {
  std::array<double, 4> c{};
  double center = 0.0;
  double operator()(double r) const {
    const double t = r - center;
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
  }
};

Cubic fit_cubic(const RadialPrescription& g, double center, double a, double b) {
  const int m = std::max(8, static_cast<int>(std::ceil((b - a) * 16.0)) + 1);
  Eigen::MatrixXd v(m, 4);
  Eigen::VectorXd y(m);
  for (int k = 0; k < m; ++k) {
    const double r = a + (b - a) * k / (m - 1);
    const double t = r - center;
    v(k, 0) = 1.0;
    v(k, 1) = t;
    v(k, 2) = t * t;
    v(k, 3) = t * t * t;
    y(k) = g(r);
  }
  const Eigen::Vector4d c = v.colPivHouseholderQr().solve(y);
  Cubic out;
  out.center = center;
  for (int j = 0; j < 4; ++j) out.c[j] = c(j);
  return out;
}

double fit_error(const Cubic& p, const RadialPrescription& g, double a, double b) {
  constexpr int samples = 96;
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double r = a + (b - a) * k / samples;
    worst = std::max(worst, std::abs(p(r) - g(r)));
  }
  return worst;
}

double grid_min(const RadialPrescription& g, const std::vector<double>& grid) {
  double lo = HUGE_VAL;
  for (double r : grid) lo = std::min(lo, g.raw(r));
  return lo;
}

}  // namespace

std::vector<std::vector<double>> sphere_directions(int n, std::size_t count) {
  if (n < 2 || n > 16) throw Error(Errc::domain_error, "sphere dimension out of range");
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  for (std::size_t i = 1; dirs.size() < count; ++i) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      // Cranley-Patterson shift keeps coordinate axes out of the sample.
      double u = radical_inverse(i, kPrimes[j]) + std::sqrt(static_cast<double>(kPrimes[j]));
      u -= std::floor(u);
      w[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
      norm2 += w[j] * w[j];
    }
    if (!(norm2 > 1e-20) || !std::isfinite(norm2)) continue;
    for (double& x : w) x /= std::sqrt(norm2);
    dirs.push_back(std::move(w));
  }
  return dirs;
}

EnvelopePair radial_envelopes(const DirectionalPrescription& h, const std::vector<double>& r_grid,
                              std::size_t cap) {
  const int n = h.dimension();
  std::size_t count = static_cast<std::size_t>(2 * n * n);
  if (count > cap) throw Error(Errc::sampler_cap_exceeded, "cap below 2 n^2");
  auto dirs = std::make_shared<const Directions>(sphere_directions(n, count));
  while (true) {
    if (2 * count > cap) {
      std::ostringstream msg;
      msg << "sphere sup/inf still moving by >= 1e-3 at " << count << " directions";
      throw Error(Errc::sampler_cap_exceeded, msg.str());
    }
    auto finer = std::make_shared<const Directions>(sphere_directions(n, 2 * count));
    double change = 0.0;
    for (double r : r_grid) {
      change = std::max(change, std::abs(sphere_extreme(h, *finer, r, 1) -
                                         sphere_extreme(h, *dirs, r, 1)));
      change = std::max(change, std::abs(sphere_extreme(h, *finer, r, -1) -
                                         sphere_extreme(h, *dirs, r, -1)));
    }
    dirs = finer;
    count *= 2;
    if (change < 1e-3) break;
  }
  return EnvelopePair{sampled_envelope(h, dirs, 1), sampled_envelope(h, dirs, -1), r_grid, count};
}

EnvelopePair positive_part_normalize(const EnvelopePair& pair) {
  const RadialPrescription hm = pair.h_minus;
  const RadialPrescription hp = pair.h_plus;
  RadialPrescription up(
      hm.dimension(), [hm](double r) { return 1.0 + std::max(hm.raw(r) - 1.0, 0.0); },
      "1+(" + hm.name() + "-1)_+");
  RadialPrescription down(
      hp.dimension(), [hp](double r) { return 1.0 - std::max(1.0 - hp.raw(r), 0.0); },
      "1-(1-" + hp.name() + ")_+");
  if (!(grid_min(down, pair.r_grid) > 0.0)) {
    throw Error(Errc::non_positive_envelope, "1 - (1 - h+)_+ is not positive on the grid");
  }
  return EnvelopePair{up, down, pair.r_grid, pair.sphere_nodes};
}

double margin(double eps0, double r) { return r <= 1.0 ? eps0 : eps0 / (r * r); }

EnvelopePair add_margins(const EnvelopePair& pair, double eps0) {
  if (!(eps0 > 0.0)) throw Error(Errc::domain_error, "eps0 must be positive");
  const double inf_plus = grid_min(pair.h_plus, pair.r_grid);
  if (!(eps0 < inf_plus)) {
    std::ostringstream msg;
    msg << "eps0 = " << eps0 << " is not below inf h+ = " << inf_plus;
    throw Error(Errc::margin_too_large, msg.str());
  }
  const RadialPrescription hm = pair.h_minus;
  const RadialPrescription hp = pair.h_plus;
  std::ostringstream tag;
  tag << eps0;
  RadialPrescription up(
      hm.dimension(), [hm, eps0](double r) { return hm.raw(r) + margin(eps0, r); },
      hm.name() + "+margin(" + tag.str() + ")");
  RadialPrescription down(
      hp.dimension(), [hp, eps0](double r) { return hp.raw(r) - margin(eps0, r); },
      hp.name() + "-margin(" + tag.str() + ")");
  return EnvelopePair{up, down, pair.r_grid, pair.sphere_nodes};
}

double blend_theta(double x) { return 1.0 - smoothstep(2.0 * (std::abs(x) - 0.25)); }

RadialPrescription smooth_blend(const RadialPrescription& input, double eps0, int extent) {
  if (!(eps0 > 0.0)) throw Error(Errc::domain_error, "eps0 must be positive");
  if (extent < 1) throw Error(Errc::domain_error, "smoothing extent must be >= 1");
  auto windows = std::make_shared<std::vector<Cubic>>();
  for (int i = 0; i <= extent; ++i) {
    const double budget = eps0 / ((i + 1.0) * (i + 1.0));
    const double lo = std::max(0.0, i - 0.75);
    const double hi = i + 0.75;
    Cubic p = fit_cubic(input, i, std::max(0.0, i - 1.0), i + 1.0);
    if (fit_error(p, input, lo, hi) > budget) {
      p = fit_cubic(input, i, lo, hi);
      const double err = fit_error(p, input, lo, hi);
      if (err > budget) {
        std::ostringstream msg;
        msg << "window " << i << " fit error " << err << " exceeds budget " << budget;
        throw Error(Errc::fit_budget_exceeded, msg.str());
      }
    }
    windows->push_back(p);
  }
  auto fn = [input, windows, extent](double r) {
    const int base = static_cast<int>(std::floor(r));
    double value = 0.0;
    double weight = 0.0;
    for (int i = base; i <= base + 1; ++i) {
      if (i < 0 || i > extent) continue;
      const double w = blend_theta(r - i);
      if (w == 0.0) continue;
      value += w * (*windows)[static_cast<std::size_t>(i)](r);
      weight += w;
    }
    if (r > extent + 0.25) value += (1.0 - weight) * input.raw(r);
    return value;
  };
  return RadialPrescription(input.dimension(), fn, "smooth(" + input.name() + ")",
                            input.flat_near_zero(), input.limit_at_infinity());
}

double smoothing_error_ratio(const RadialPrescription& smoothed, const RadialPrescription& input,
                             double eps0, double r_max, std::size_t samples) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = r_max * (k + 0.5) / static_cast<double>(samples);
    const double allowed = std::min(eps0, eps0 / (r * r));
    worst = std::max(worst, std::abs(smoothed.raw(r) - input.raw(r)) / allowed);
  }
  return worst;
}

RadialPrescription flatten_near_zero(const RadialPrescription& g, FlattenMode mode,
                                     double extent) {
  const int sign = mode == FlattenMode::sup ? 1 : -1;
  double extreme = g.raw(0.0);
  auto visit = [&](double r) {
    const double v = g.raw(r);
    extreme = sign > 0 ? std::max(extreme, v) : std::min(extreme, v);
  };
  for (int k = 0; k <= 3000; ++k) visit(0.75 * k / 3000.0);
  for (double r = 0.75; r <= extent; r += 1.0 / 64.0) visit(r);
  auto fn = [g, extreme](double r) {
    const double t = blend_theta(r);
    if (t == 1.0) return extreme;
    if (t == 0.0) return g.raw(r);
    return t * extreme + (1.0 - t) * g.raw(r);
  };
  return RadialPrescription(g.dimension(), fn,
                            std::string(sign > 0 ? "flat-sup(" : "flat-inf(") + g.name() + ")",
                            true, g.limit_at_infinity());
}

RadialSolution normalize_at_infinity(const RadialSolution& solution, double delta,
                                     PhiLimit* limit) {
  const PhiLimit lim = estimate_phi_limit(solution, delta);
  if (limit) *limit = lim;
  return phi_quadrature(solution, solution.phi0() - lim.estimate);
}

BarrierCheck check_barrier_inequalities(const DirectionalPrescription& h,
                                        const RadialPrescription& g_minus,
                                        const RadialPrescription& g_plus, double r_max,
                                        std::size_t points, unsigned seed) {
  const std::size_t n = static_cast<std::size_t>(h.dimension());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.0, r_max);
  BarrierCheck out;
  out.points = points;
  out.min_upper_slack = HUGE_VAL;
  out.min_lower_slack = HUGE_VAL;
  std::vector<double> chart(n);
  for (std::size_t k = 0; k < points; ++k) {
    double norm2 = 0.0;
    for (double& c : chart) {
      c = normal(rng);
      norm2 += c * c;
    }
    const double r = radius(rng);
    const double scale = std::sinh(r) / std::sqrt(norm2);
    for (double& c : chart) c *= scale;
    const HyperbolicPoint x(chart);
    const double hx = h(x);
    const double rr = x.radius();
    out.min_upper_slack = std::min(out.min_upper_slack, g_minus(rr) - hx);
    out.min_lower_slack = std::min(out.min_lower_slack, hx - g_plus(rr));
  }
  return out;
}

BarrierPair build_barrier_pair(const DirectionalPrescription& h, double eps0, double tol,
                               const BarrierOptions& options) {
  const double r_max = options.r_max;
  if (!(r_max > 1.0)) throw Error(Errc::domain_error, "barrier r_max must exceed 1");
  const int extent = static_cast<int>(std::ceil(r_max)) + 1;
  std::vector<double> grid;
  for (double r = 0.0; r <= extent + 1.0 + 1e-12; r += options.grid_spacing) grid.push_back(r);

  EnvelopePair raw = radial_envelopes(h, grid, options.sampler_cap);
  EnvelopePair clipped = positive_part_normalize(raw);

  const Boundedness cm = classify_boundedness(clipped.h_minus);
  const Boundedness cp = classify_boundedness(clipped.h_plus);
  if (cm != Boundedness::bounded || cp != Boundedness::bounded) {
    std::ostringstream msg;
    msg << "envelope integrals: int (h- - 1)_+ " << boundedness_name(cm)
        << ", int (1 - h+)_+ " << boundedness_name(cp);
    throw Error(Errc::not_integrable, msg.str());
  }

  if (!(eps0 > 0.0)) eps0 = std::min(0.05, 0.5 * grid_min(clipped.h_plus, grid));
  EnvelopePair widened = add_margins(clipped, eps0);

  RadialPrescription smooth_minus = smooth_blend(widened.h_minus, eps0, extent);
  RadialPrescription smooth_plus = smooth_blend(widened.h_plus, eps0, extent);
  RadialPrescription g_minus = flatten_near_zero(smooth_minus, FlattenMode::sup, extent);
  RadialPrescription g_plus = flatten_near_zero(smooth_plus, FlattenMode::inf, extent);

  PhiLimit lim_minus;
  PhiLimit lim_plus;
  RadialSolution phi_minus =
      normalize_at_infinity(solve_radial(g_minus, r_max, tol), options.delta, &lim_minus);
  RadialSolution phi_plus =
      normalize_at_infinity(solve_radial(g_plus, r_max, tol), options.delta, &lim_plus);

  BarrierCheck check =
      check_barrier_inequalities(h, g_minus, g_plus, r_max, options.check_points);

  return BarrierPair{
      .dimension = h.dimension(),
      .eps0 = eps0,
      .sphere_nodes = raw.sphere_nodes,
      .raw = raw,
      .widened = widened,
      .smoothed_minus = smooth_minus,
      .smoothed_plus = smooth_plus,
      .g_minus = g_minus,
      .g_plus = g_plus,
      .phi_minus = phi_minus,
      .phi_plus = phi_plus,
      .normalization_constants = {lim_minus.estimate, lim_plus.estimate},
      .limit_minus = lim_minus,
      .limit_plus = lim_plus,
      .check = check,
      .classification = {cm, cp},
  };
}

double pinching_violation(const BarrierPair& pair, const RadialSolution& direct) {
  double worst = -HUGE_VAL;
  for (std::size_t k = 0; k < direct.size(); ++k) {
    const double r = direct.r()[k];
    if (r > pair.phi_minus.r_max() || r > pair.phi_plus.r_max()) break;
    const double phi = direct.phi()[k];
    worst = std::max(worst, pair.phi_minus.phi_at(r) - phi);
    worst = std::max(worst, phi - pair.phi_plus.phi_at(r));
  }
  return worst;
}

}  // namespace rsc
