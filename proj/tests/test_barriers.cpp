#include <cmath>

#include <doctest.h>

#include "rsc/barriers.hpp"
#include "rsc/error.hpp"

using namespace rsc;

TEST_CASE("sphere directions are unit vectors") {
  const auto dirs = sphere_directions(3, 64);
  REQUIRE(dirs.size() == 64);
  for (const auto& d : dirs) {
    CHECK(std::hypot(d[0], d[1], d[2]) == doctest::Approx(1.0));
  }
  CHECK(sphere_directions(3, 64) == dirs);
}

TEST_CASE("margin and blend profile") {
  CHECK(margin(0.05, 0.5) == doctest::Approx(0.05));
  CHECK(margin(0.05, 10.0) == doctest::Approx(5e-4));
  CHECK(blend_theta(0.0) == 1.0);
  CHECK(blend_theta(0.25) == 1.0);
  CHECK(blend_theta(0.75) == doctest::Approx(0.0));
  CHECK(blend_theta(1.0) == 0.0);
  CHECK(blend_theta(0.5) == doctest::Approx(0.5));
}

TEST_CASE("envelopes of a radial prescription are the prescription") {
  const auto h = families::power_deficit(2, 0.3, 2.0);
  const auto env = radial_envelopes(DirectionalPrescription::from_radial(h), {0.0, 1.0, 5.0});
  for (double r : {0.0, 1.0, 5.0}) {
    CHECK(env.h_minus(r) == doctest::Approx(h(r)));
    CHECK(env.h_plus(r) == doctest::Approx(h(r)));
  }
}

TEST_CASE("directional envelopes approach the closed form from inside") {
  const auto env = radial_envelopes(families::directional(3, 0.2, 2.0), {0.0, 0.5, 2.0});
  for (double r : {0.5, 2.0}) {
    CHECK(env.h_minus(r) <= families::directional_sup(0.2, 2.0, r) + 1e-12);
    CHECK(env.h_minus(r) == doctest::Approx(families::directional_sup(0.2, 2.0, r)).epsilon(1e-2));
    CHECK(env.h_plus(r) >= families::directional_inf(0.2, 2.0, r) - 1e-12);
  }
}

TEST_CASE("barrier pair for a radial prescription pinches its solution") {
  const auto h = families::power_deficit(2, 0.3, 2.0);
  BarrierOptions options;
  options.r_max = 20.0;
  const auto pair = build_barrier_pair(DirectionalPrescription::from_radial(h), 0.0, 1e-10, options);
  CHECK(pair.check.holds());
  CHECK(pair.check.points == 10000);
  CHECK(smoothing_error_ratio(pair.smoothed_minus, pair.widened.h_minus, pair.eps0, 20.0) <= 1.0);
  CHECK(smoothing_error_ratio(pair.smoothed_plus, pair.widened.h_plus, pair.eps0, 20.0) <= 1.0);
  const auto direct = normalize_at_infinity(solve_radial(h, 20.0, 1e-10), 0.1);
  CHECK(pinching_violation(pair, direct) <= 0.0);
}

TEST_CASE("flattening is constant near the pole") {
  const auto h = families::power_deficit(2, 0.3, 2.0);
  const auto g = flatten_near_zero(h, FlattenMode::inf, 6.0);
  CHECK(g(0.0) == doctest::Approx(g(0.2)));
  CHECK(g(10.0) == doctest::Approx(h(10.0)));
}
