#include <doctest.h>

#include "twofold/error.hpp"
#include "twofold/hamiltonian.hpp"

#include <cmath>
#include <vector>

using namespace twofold;
namespace ham = twofold::hamiltonian;

TEST_CASE("region classification on the switching line") {
  // lambda = -3/2: the strip near x_v attracts at theta = 1.5 and repels at 4.5.
  const FilippovModel m = ham::make_model({1.0, -1.5, 3.0}, 0.1);
  CHECK(classify_point(m, 1.5, 1.0) == RegionKind::Sliding);
  CHECK(classify_point(m, 4.5, 1.0) == RegionKind::Escaping);
  CHECK(classify_point(m, 1.5, 0.0) == RegionKind::Crossing);
  CHECK(classify_point(m, 1.5, 2.0) == RegionKind::Crossing);
  const FilippovModel m0 = ham::make_model({1.0, -1.5, 3.0}, 0.0);
  CHECK(classify_point(m0, 0.0, 1.0) == RegionKind::TangencyBoth);
}

TEST_CASE("fold visibility of the unperturbed model") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  CHECK(fold_visibility(m, Side::Minus, 0.0, 1.0) == Visibility::Visible);
  CHECK(fold_visibility(m, Side::Minus, 0.0, -1.0) == Visibility::Invisible);
  CHECK(fold_visibility(m, Side::Plus, 0.0, 1.0) == Visibility::Visible);
  CHECK(fold_visibility(m, Side::Plus, 0.0, -1.0) == Visibility::Invisible);
  CHECK_THROWS_AS(fold_visibility(m, Side::Minus, 0.0, 0.0), Error);
}

TEST_CASE("sliding vector is tangent to the line and region checked") {
  const FilippovModel m = ham::make_model({1.0, -1.5, 3.0}, 0.1);
  const Vec2 v = sliding_field(m, 1.5, 1.0);
  CHECK(v.y() == doctest::Approx(0.0).epsilon(1e-15));
  // Convex combination of the two side fields.
  const double a = m.normal(Side::Minus, 1.5, 1.0), b = m.normal(Side::Plus, 1.5, 1.0);
  const Vec2 ref = (a * m.field(Side::Plus, 1.5, Vec2(1.0, 0.0)) - b * m.field(Side::Minus, 1.5, Vec2(1.0, 0.0))) /
                   (a - b);
  CHECK((v - ref).norm() < 1e-15);
  try {
    sliding_field(m, 1.5, 0.0);
    FAIL("expected NotSlidingRegion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSlidingRegion);
  }
}

TEST_CASE("reversibility and time reversal") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0}, 0.1);
  std::vector<Vec2> grid;
  for (int i = -3; i <= 3; ++i) {
    for (int j = -3; j <= 3; ++j) grid.emplace_back(0.5 * i, 0.5 * j);
  }
  const ReversibilityReport r = check_reversibility(m, grid);
  CHECK(r.reversible);
  CHECK(r.max_defect == 0.0);

  const FilippovModel t = m.time_reversed();
  for (const Vec2& z : grid) {
    for (double s : {0.3, 1.7, 3.1}) {
      CHECK((t.field(Side::Minus, s, z) + reflect(m.field(Side::Plus, -s, reflect(z)))).norm() < 1e-15);
      CHECK((t.field(Side::Plus, s, z) + reflect(m.field(Side::Minus, -s, reflect(z)))).norm() < 1e-15);
    }
  }
}

TEST_CASE("phase reduction and epsilon copies") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0}, 0.1);
  CHECK(m.period() == 4.0);
  CHECK(m.reduce(9.0) == doctest::Approx(1.0));
  CHECK(m.reduce(-1.0) == doctest::Approx(3.0));
  const FilippovModel z = m.with_epsilon(0.0);
  CHECK(z.field(Side::Minus, 1.0, Vec2(0.5, 0.0)).y() == doctest::Approx(-0.75));
  CHECK(m.field(Side::Minus, 1.0, Vec2(0.5, 0.0)).y() == doctest::Approx(-0.75 + 0.1));
}
