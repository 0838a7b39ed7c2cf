// One PASS/FAIL line per acceptance criterion. With an argument k only
// criterion k runs and the exit status reports it; without, all run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "rsc/asymptotics.hpp"
#include "rsc/barriers.hpp"
#include "rsc/cartesian.hpp"
#include "rsc/radial_ode.hpp"

using namespace rsc;

namespace {

constexpr double kTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Criterion 5 bookkeeping: every solve made by the suite is checked.
struct TrapTally {
  std::size_t runs = 0;
  std::size_t nodes = 0;
  std::size_t bad = 0;
} tally;

RadialSolution checked_solve(const RadialPrescription& h, double r_max, double tol = kTol,
                             double phi0 = 0.0) {
  RadialSolution sol = solve_radial(h, r_max, tol, phi0);
  const int n = sol.dimension();
  ++tally.runs;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    ++tally.nodes;
    const double r = sol.r()[k];
    const double q = r > 0.0 ? sinh_ratio(sol.s()[k], r) : 0.0;
    const bool trapped = (n - 2) * q * q <= n * std::pow(h(r), 2) * (1.0 + 1e-9) + 1e-12;
    if (!trapped || node_curvatures(sol, k).admissible_up_to < 2) ++tally.bad;
  }
  return sol;
}

Outcome exact_solution() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = checked_solve(families::constant(3, 1.0), 30.0, kTol, 0.0);
  const double t = seconds_since(t0);
  double ds = 0.0;
  double dphi = 0.0;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    ds = std::max(ds, std::abs(sol.s()[k] - sol.r()[k]));
    dphi = std::max(dphi, std::abs(sol.phi()[k]));
  }
  o.require(ds < 1e-8, fmt("max|s-r| %.2e < 1e-8", ds));
  o.require(dphi < 1e-10, fmt("max|phi-phi0| %.2e < 1e-10", dphi));
  o.require(t < 1.0, fmt("runtime %.3fs < 1s", t));
  return o;
}

Outcome initial_slope() {
  Outcome o;
  for (double h0 : {0.5, 1.0, 2.0}) {
    const auto sol = checked_solve(families::constant(3, h0), 1.0);
    const double err = std::abs(sol.s_at(1e-3) / 1e-3 - h0);
    o.require(err < 1e-5, fmt("h0=%g |s/r-h0| %.2e", h0, err));
  }
  return o;
}

Outcome residual() {
  Outcome o;
  for (int n : {2, 3, 5}) {
    for (double p : {0.5, 1.0, 2.0}) {
      const auto h = families::power_deficit(n, 0.3, p);
      const double coarse = max_of(f2_residual(checked_solve(h, 40.0, kTol)));
      const double fine = max_of(f2_residual(checked_solve(h, 40.0, kTol / 16.0)));
      o.require(coarse < 1e-6 && coarse / fine >= 8.0,
                fmt("n=%g p=%g res %.2e", n, p, coarse) + fmt(" ratio %.1f", coarse / fine));
    }
  }
  return o;
}

Outcome monotonicity() {
  Outcome o;
  struct Case {
    RadialPrescription h;
    int sign;
  };
  const std::vector<Case> cases{
      {families::power_deficit(3, 0.3, 0.5), -1}, {families::power_deficit(2, 0.3, 2.0), -1},
      {families::bertrand(3, 0.3, 2.0), -1},      {families::constant(5, 0.5), -1},
      {families::power_excess(3, 0.3, 1.0), 1},   {families::power_excess(5, 0.5, 2.0), 1},
      {families::constant(3, 2.0), 1}};
  for (const auto& c : cases) {
    const auto sol = checked_solve(c.h, 40.0);
    bool ok = true;
    for (std::size_t k = 1; k < sol.size(); ++k) {
      if (c.sign * (sol.phi()[k] - sol.phi()[k - 1]) < -1e-9) ok = false;
    }
    o.require(ok, c.h.name() + (c.sign < 0 ? " nonincreasing" : " nondecreasing"));
  }
  return o;
}

Outcome trap_admissibility() {
  Outcome o;
  o.require(tally.runs > 0, "runs " + std::to_string(tally.runs));
  o.require(tally.bad == 0, std::to_string(tally.nodes - tally.bad) + "/" + std::to_string(tally.nodes) +
                                " nodes trapped and in Gamma_2");
  return o;
}

Outcome boundedness() {
  Outcome o;
  {
    const auto h = families::power_deficit(3, 0.3, 2.0);
    const auto b = classify_boundedness(h);
    o.require(b == Boundedness::bounded, "p=2 " + std::string(boundedness_name(b)));
    const auto r40 = checked_solve(h, 40.0);
    const auto r80 = checked_solve(h, 80.0);
    const double drift = std::abs(r80.phi_at(80.0) - r80.phi_at(40.0));
    o.require(drift < 1e-4, fmt("|phi(80)-phi(40)| %.2e < 1e-4", drift));
    const double width = estimate_phi_limit(r40).width();
    o.require(width < 1e-4, fmt("envelope width %.2e < 1e-4", width));
  }
  for (double p : {0.5, 1.0}) {
    const auto h = families::power_deficit(3, 0.3, p);
    const auto b = classify_boundedness(h);
    o.require(b == Boundedness::unbounded, fmt("p=%g ", p) + std::string(boundedness_name(b)));
    const auto sol = checked_solve(h, 80.0);
    for (double r : {20.0, 40.0}) {
      const double growth = std::abs(sol.phi_at(2 * r)) - std::abs(sol.phi_at(r));
      // integral of 0.3 (1 + t)^-p over [r, 2r]
      const double analytic = p == 1.0 ? 0.3 * std::log((1 + 2 * r) / (1 + r))
                                       : 0.3 * (std::pow(1 + 2 * r, 1 - p) - std::pow(1 + r, 1 - p)) / (1 - p);
      o.require(growth >= 0.5 * analytic, fmt("p=%g R=%g growth %.3g", p, r, growth) +
                                              fmt(" >= %.3g", 0.5 * analytic));
    }
  }
  return o;
}

Outcome linearization() {
  Outcome o;
  for (int n : {2, 3, 5}) {
    const auto sol = checked_solve(families::power_deficit(n, 0.3, 2.0), 40.0);
    const double res = verify_asymptotic_ode(sol, 10.0);
    const TailFit fit = tail_exponent_fit(sol);
    const double off = std::abs(fit.ratio / fit.predicted - 1.0);
    o.require(res < 0.05 && off < 0.1,
              fmt("n=%g lin res %.4f, eps/beta %.3f", n, res, fit.ratio) + fmt(" vs %.3f", fit.predicted));
  }
  return o;
}

double hyperboloid(std::span<const double> x) {
  double rho2 = 0.0;
  for (double v : x) rho2 += v * v;
  return std::sqrt(1.0 + rho2);
}

Outcome cartesian() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto kappa_error = [](double spacing) {
    const auto patch = patch_from_function(2, -1.0, 1.0, spacing, hyperboloid);
    double worst = 0.0;
    for (std::size_t f : patch.interior_nodes()) {
      for (double k : discrete_shape_operator(patch, f).kappas) worst = std::max(worst, std::abs(k - 1.0));
    }
    return worst;
  };
  const double e2 = kappa_error(2e-2);
  const double e1 = kappa_error(1e-2);
  o.require(e1 < 1e-3, fmt("hyperboloid |kappa-1| %.2e", e1));
  o.require(e2 / e1 >= 3.5 && e2 / e1 <= 4.5, fmt("refinement ratio %.3f", e2 / e1));

  // Flattened near the pole so the radial graph is smooth at the origin.
  const auto g = flatten_near_zero(families::power_deficit(2, 0.3, 2.0), FlattenMode::inf, 6.0);
  const auto sol = checked_solve(g, 5.0);
  const auto dg = DirectionalPrescription::from_radial(g);
  const auto coarse = summarize_patch(to_cartesian(sol, -1.0, 1.0, 4e-2), dg);
  const auto fine = summarize_patch(to_cartesian(sol, -1.0, 1.0, 2e-2), dg);
  const double order = std::log2(coarse.max_residual / fine.max_residual);
  o.require(fine.max_residual < 1e-2, fmt("H2 residual %.2e at 2e-2", fine.max_residual));
  o.require(order >= 1.8, fmt("observed order %.2f", order));
  const double t = seconds_since(t0);
  o.require(t < 30.0, fmt("runtime %.2fs < 30s", t));
  return o;
}

Outcome scaling() {
  Outcome o;
  const auto sol = checked_solve(families::power_deficit(2, 0.3, 2.0), 5.0);
  const auto patch = to_cartesian(sol, -1.0, 1.0, 4e-2);
  for (double lambda : {0.5, 3.0}) {
    const auto scaled = dilate(patch, lambda);
    double worst = 0.0;
    for (std::size_t f : patch.interior_nodes()) {
      const double base = discrete_shape_operator(patch, f).sigma(2);
      const double dil = discrete_shape_operator(scaled, f).sigma(2);
      worst = std::max(worst, std::abs(dil * lambda * lambda - base) / base);
    }
    o.require(worst < 1e-9, fmt("lambda=%g rel dev %.2e", lambda, worst));
  }
  const auto h = families::power_excess(3, 0.3, 1.0);
  const auto base = checked_solve(h, 20.0, kTol, 0.0);
  double worst = 0.0;
  for (double phi0 : {-1.0, 1.0}) {
    const auto other = checked_solve(h, 20.0, kTol, phi0);
    if (other.size() != base.size()) {
      worst = HUGE_VAL;
      continue;
    }
    for (std::size_t k = 0; k < base.size(); ++k) {
      worst = std::max({worst, std::abs(other.r()[k] - base.r()[k]), std::abs(other.s()[k] - base.s()[k])});
    }
  }
  o.require(worst <= 1e-12, fmt("phi0 shift s-grid dev %.2e", worst));
  return o;
}

Outcome barriers() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 3;
  const auto h = families::directional(n, 0.2, 2.0);
  BarrierOptions options;
  const BarrierPair pair = build_barrier_pair(h, 0.05, kTol, options);
  o.require(pair.check.holds() && pair.check.points == 10000,
            fmt("g- >= h >= g+ slack %.2e, %.2e", pair.check.min_upper_slack, pair.check.min_lower_slack));
  const double sm = smoothing_error_ratio(pair.smoothed_minus, pair.widened.h_minus, pair.eps0, options.r_max);
  const double sp = smoothing_error_ratio(pair.smoothed_plus, pair.widened.h_plus, pair.eps0, options.r_max);
  o.require(sm <= 1.0 && sp <= 1.0, fmt("smoothing ratio %.3f, %.3f", sm, sp));
  auto vanishes = [](const RadialSolution& s, const PhiLimit& lim) {
    const double end = s.phi().back();
    return end + lim.envelope[0] <= 1e-12 && end + lim.envelope[1] >= -1e-12;
  };
  o.require(vanishes(pair.phi_minus, pair.limit_minus) && vanishes(pair.phi_plus, pair.limit_plus),
            "phi+- vanish at infinity within envelope");
  const auto direct =
      normalize_at_infinity(checked_solve(families::directional_radial_member(n, 0.2, 2.0), options.r_max),
                            options.delta);
  const double pinch = pinching_violation(pair, direct);
  o.require(pinch <= 0.0, fmt("pinching violation %.2e <= 0", pinch));
  const double t = seconds_since(t0);
  o.require(t < 10.0, fmt("runtime %.2fs < 10s", t));
  return o;
}

Outcome exhaustion() {
  Outcome o;
  for (const auto& h : {families::power_deficit(3, 0.3, 1.0), families::power_excess(2, 0.3, 2.0)}) {
    const double dev = overlap_consistency(h, {5.0, 10.0, 20.0}, kTol);
    o.require(dev <= 10 * kTol, h.name() + fmt(" overlap dev %.2e <= 1e-9", dev));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact-solution recovery", exact_solution},
      {"initial slope", initial_slope},
      {"self-consistency residual", residual},
      {"monotonicity dichotomy", monotonicity},
      {"trap and admissibility", trap_admissibility},
      {"boundedness dichotomy", boundedness},
      {"asymptotic linearization", linearization},
      {"cartesian oracle", cartesian},
      {"dilation and translation", scaling},
      {"barrier pipeline", barriers},
      {"exhaustion consistency", exhaustion},
  };
  std::vector<std::size_t> selected;
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
      return 2;
    }
    // Criterion 5 audits the solves of the others.
    if (k == 5) {
      for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (i != 4) {
          try {
            criteria[i].second();
          } catch (const std::exception&) {
          }
        }
      }
    }
    selected.push_back(static_cast<std::size_t>(k - 1));
  } else {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (i != 4) selected.push_back(i);
    }
    selected.push_back(4);
  }

  std::vector<std::pair<std::size_t, Outcome>> results;
  for (std::size_t i : selected) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    results.emplace_back(i, o);
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  bool all = true;
  for (const auto& [i, o] : results) {
    all = all && o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  return all ? 0 : 1;
}
