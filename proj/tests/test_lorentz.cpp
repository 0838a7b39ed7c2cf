#include <cmath>
#include <vector>

#include <doctest.h>

#include "rsc/error.hpp"
#include "rsc/lorentz.hpp"

using namespace rsc;

TEST_CASE("elementary symmetric functions match hand values") {
  const std::vector<double> k{1.0, 2.0, 3.0};
  CHECK(elementary_symmetric(k, 1) == doctest::Approx(6.0));
  CHECK(elementary_symmetric(k, 2) == doctest::Approx(11.0));
  CHECK(elementary_symmetric(k, 3) == doctest::Approx(6.0));
  const auto all = elementary_symmetric_all(k, 3);
  CHECK(all == std::vector<double>{6.0, 11.0, 6.0});
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(3, 0) == 1.0);
}

TEST_CASE("Garding cone membership") {
  CHECK(is_admissible(std::vector<double>{1.0, 1.0, -0.4}, 2));
  CHECK_FALSE(is_admissible(std::vector<double>{1.0, -0.9, -0.9}, 2));
  CHECK(is_admissible(std::vector<double>{1.0, -0.9, -0.9}, 1) == false);
  const auto chain = mclaurin_check(std::vector<double>{1.0, 2.0, 3.0}, 2);
  CHECK(chain.holds);
  CHECK(chain.normalized_means[0] == doctest::Approx(2.0));
  CHECK(chain.normalized_means[1] == doctest::Approx(std::sqrt(11.0 / 3.0)));
  try {
    mclaurin_check(std::vector<double>{1.0, -0.9, -0.9}, 2);
    FAIL("expected NotAdmissible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_admissible);
  }
}

TEST_CASE("unit sphere spectrum") {
  const auto spec = CurvatureSpectrum::from_kappas({1.0, 1.0, 1.0}, 2);
  CHECK(spec.sigma(2) == doctest::Approx(3.0));
  CHECK(spec.admissible_up_to == 2);
}

TEST_CASE("polar decomposition of the future cone") {
  const SpacetimePoint x{{0.0, 0.0, 0.0}, 2.0};
  const auto pd = polar_decompose(x);
  CHECK(pd.rho == doctest::Approx(2.0));
  CHECK(pd.direction.radius() == doctest::Approx(0.0));

  const auto y = HyperbolicPoint::along_axis(3, 1.5);
  const auto z = polar_recompose(y, 3.0);
  CHECK(minkowski_inner(z, z) == doctest::Approx(-9.0));
  const auto back = polar_decompose(z);
  CHECK(back.rho == doctest::Approx(3.0));
  CHECK(back.direction.radius() == doctest::Approx(1.5));
  CHECK(hyperbolic_distance(HyperbolicPoint::apex(3), y) == doctest::Approx(1.5));

  CHECK_FALSE(in_future_cone(SpacetimePoint{{2.0, 0.0}, 1.0}));
  try {
    polar_decompose(SpacetimePoint{{2.0, 0.0}, 1.0});
    FAIL("expected NotInFutureCone");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_in_future_cone);
  }
}

TEST_CASE("hyperbolic distance keeps accuracy for nearby points") {
  const auto a = HyperbolicPoint::along_axis(2, 2.0);
  const auto b = HyperbolicPoint::along_axis(2, 2.0 + 1e-9);
  CHECK(hyperbolic_distance(a, b) == doctest::Approx(1e-9).epsilon(1e-6));
  const auto c = HyperbolicPoint(std::vector<double>{0.3, -0.4});
  CHECK(c.embed().height == doctest::Approx(std::sqrt(1.25)));
}
