#include <doctest.h>

#include "oracles.hpp"

#include "twofold/error.hpp"
#include "twofold/hamiltonian.hpp"

#include <cmath>
#include <numbers>

using namespace twofold;
namespace ham = twofold::hamiltonian;
using std::numbers::pi;

TEST_CASE("return time closed forms") {
  for (double a : {0.5, 1.0, 2.0}) {
    const double r = std::sqrt(a);
    CHECK(ham::sigma_bar(a, r) == doctest::Approx(3.0 * r));
    for (double s : {-0.9, -0.3, 0.4, 0.99}) {
      const double x = s * r;
      CHECK(ham::sigma_bar(a, x) == doctest::Approx(oracle::return_time(a, x)).epsilon(1e-12));
      CHECK(ham::sigma_bar_prime(a, x) == doctest::Approx(oracle::return_time_prime(a, x)).epsilon(1e-7));
      CHECK(ham::x_sigma(a, ham::sigma_bar(a, x)) == doctest::Approx(x).epsilon(1e-12));
    }
  }
  CHECK(ham::x_sigma(1.0, 2.0) == doctest::Approx(1.0 - std::sqrt(6.0) / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(ham::sigma_bar(1.0, -1.0), Error);
  CHECK_THROWS_AS(ham::x_sigma(1.0, 3.1), Error);
  for (double s : {0.3, 1.0, 2.0, 2.9, 3.0}) CHECK(std::abs(ham::simplification_defect(1.0, s)) < 1e-13);
}

TEST_CASE("flow, fundamental matrix and energy") {
  for (double t : {0.0, 0.7, 2.1}) {
    const auto [x, y] = oracle::lower_arc(1.0, t, 0.4);
    CHECK((ham::flow_minus(1.0, t, 0.4, 0.0) - Vec2(x, y)).norm() < 1e-14);
    CHECK(ham::fundamental(t, 0.4)(1, 0) == doctest::Approx(oracle::fundamental_21(t, 0.4)));
    CHECK(ham::energy(1.0, Vec2(x, y)) == doctest::Approx(ham::energy(1.0, Vec2(0.4, 0.0))).epsilon(1e-13));
  }
  CHECK((ham::gamma(1.0, -0.5, 0.4) - reflect(ham::gamma(1.0, 0.5, 0.4))).norm() == 0.0);
}

TEST_CASE("Melnikov closed form and its lambda placement") {
  const ham::Params p{1.0, 2.0, 2.0};
  for (double th : {0.0, 0.6, 1.9, 3.3}) {
    for (double x : {-0.5, 0.2, 0.9}) {
      CHECK(ham::melnikov(p, th, x) == doctest::Approx(oracle::melnikov_sine(1.0, 2.0, 2.0, th, x)).epsilon(1e-11));
      CHECK(ham::melnikov_lambda_swapped(p, th, x) == doctest::Approx(ham::melnikov(p, -th, x)).epsilon(1e-13));
    }
    CHECK(ham::melnikov(p, th, ham::x_sigma(1.0, 2.0)) ==
          doctest::Approx(ham::melnikov_at_x_sigma(p, th)).epsilon(1e-13));
  }
  // The two placements differ away from x_sigma, so only one can match the energy balance.
  CHECK(std::abs(ham::melnikov_lambda_swapped(p, 0.5, -0.5) - oracle::melnikov_sine(1.0, 2.0, 2.0, 0.5, -0.5)) > 0.1);
  for (double lam : {-1.5, 0.5}) {
    const ham::Params q{1.0, lam, 3.0};
    for (double th : {0.0, 1.0, 4.0}) {
      CHECK(ham::melnikov(q, th, 1.0) ==
            doctest::Approx(-6.0 * (1.0 + lam) / pi * std::cos(pi * th / 3.0)).epsilon(1e-13));
    }
  }
}

TEST_CASE("expected outcome table") {
  CHECK(ham::twofold_case_table({1.0, -1.0, 3.0}).empty());
  const auto t = ham::twofold_case_table({4.0, 0.5, 6.0});
  REQUIRE(t.size() == 2);
  CHECK(t[0].theta == doctest::Approx(3.0));
  CHECK(t[0].kind == Classification::SlidingOnSigmaS);
  CHECK(t[1].theta == doctest::Approx(9.0));
  CHECK(t[1].kind == Classification::CrossingTwoFold);
  CHECK(ham::twofold_case_table({1.0, 2.0, 3.0})[0].kind == Classification::SlidingOnSigmaE);
}
