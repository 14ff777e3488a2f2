#include <doctest.h>

#include "twofold/quadrature.hpp"

#include <cmath>
#include <vector>

using namespace twofold;

TEST_CASE("polynomials and smooth integrands") {
  const auto q = integrate_gk15([](double t) { return Vec2(t * t, std::exp(t)); }, 0.0, 2.0, 1e-13);
  CHECK(std::abs(q.value[0] - 8.0 / 3.0) < 1e-13);
  CHECK(std::abs(q.value[1] - (std::exp(2.0) - 1.0)) < 1e-12);
  CHECK(q.panels >= 1);
}

TEST_CASE("breaks handle a kink and reversed limits") {
  const std::vector<double> br{-1.0, 0.0, 1.0};
  const auto q = integrate_gk15([](double t) { return Vec2(std::abs(t), 0.0); }, br, 1e-13);
  CHECK(std::abs(q.value[0] - 1.0) < 1e-14);
  const auto r = integrate_gk15([](double t) { return Vec2(t, 1.0); }, 1.0, 0.0, 1e-13);
  CHECK(std::abs(r.value[0] + 0.5) < 1e-14);
  CHECK(std::abs(r.value[1] + 1.0) < 1e-14);
}

TEST_CASE("adaptive refinement on an oscillatory integrand") {
  const auto q = integrate_gk15([](double t) { return Vec2(std::sin(40.0 * t), 0.0); }, 0.0, 3.0, 1e-12);
  CHECK(std::abs(q.value[0] - (1.0 - std::cos(120.0)) / 40.0) < 1e-11);
  CHECK(q.panels > 1);
}
