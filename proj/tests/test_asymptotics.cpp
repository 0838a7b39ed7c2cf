#include <cmath>

#include <doctest.h>

#include "rsc/asymptotics.hpp"
#include "rsc/error.hpp"

using namespace rsc;

TEST_CASE("boundedness classification") {
  CHECK(classify_boundedness(families::power_deficit(3, 0.3, 2.0)) == Boundedness::bounded);
  CHECK(classify_boundedness(families::power_deficit(3, 0.3, 1.0)) == Boundedness::unbounded);
  CHECK(classify_boundedness(families::power_deficit(3, 0.3, 0.5)) == Boundedness::unbounded);
  CHECK(classify_boundedness(families::power_deficit(3, 0.1, 1.0)) == Boundedness::unbounded);
  CHECK(classify_boundedness(families::bertrand(3, 0.3, 2.0)) == Boundedness::bounded);
  CHECK(classify_boundedness(families::constant(3, 1.0)) == Boundedness::bounded);
}

TEST_CASE("sign-changing h - 1 is inconclusive") {
  const RadialPrescription h(
      3, [](double r) { return 1.0 + 0.3 * std::sin(r) / (1.0 + r); }, "oscillating");
  CHECK(classify_boundedness(h) == Boundedness::inconclusive);
}

TEST_CASE("limit envelope brackets a longer solve") {
  const auto h = families::power_deficit(3, 0.3, 2.0);
  const auto short_run = solve_radial(h, 40.0, 1e-10);
  const auto long_run = solve_radial(h, 80.0, 1e-10);
  const PhiLimit lim = estimate_phi_limit(short_run);
  CHECK(lim.width() < 1e-4);
  const PhiLimit part = tail_bracket(short_run, 0.1, 80.0);
  const double increment = long_run.phi_at(80.0) - long_run.phi_at(40.0);
  CHECK(increment >= part.envelope[0]);
  CHECK(increment <= part.envelope[1]);
  CHECK(long_run.phi_at(80.0) - short_run.phi().back() >= lim.envelope[0]);
}

TEST_CASE("tiny slack invalidates the envelope") {
  const auto sol = solve_radial(families::power_deficit(3, 0.3, 2.0), 40.0, 1e-10);
  try {
    estimate_phi_limit(sol, 1e-12);
    FAIL("expected EnvelopeInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::envelope_invalid);
  }
}

TEST_CASE("linearized tail balance") {
  for (int n : {2, 3, 5}) {
    const auto sol = solve_radial(families::power_deficit(n, 0.3, 2.0), 40.0, 1e-10);
    CHECK(verify_asymptotic_ode(sol, 10.0) < 0.05);
    const TailFit fit = tail_exponent_fit(sol);
    CHECK(fit.predicted == doctest::Approx(n / (2.0 * (n - 1))));
    CHECK(std::abs(fit.ratio / fit.predicted - 1.0) < 0.1);
  }
}

TEST_CASE("h = 1 has a vanishing linearization numerator") {
  const auto sol = solve_radial(families::constant(3, 1.0), 20.0, 1e-10);
  for (double x : beta_on_grid(sol)) CHECK(std::abs(x) < 1e-12);
  CHECK(tail_exponent_fit(sol).skipped);
}
