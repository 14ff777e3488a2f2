#include <doctest.h>

#include "oracles.hpp"

#include "twofold/annulus.hpp"
#include "twofold/error.hpp"
#include "twofold/hamiltonian.hpp"

#include <cmath>

using namespace twofold;
namespace ham = twofold::hamiltonian;

namespace {

SmoothField poly_field(double f1, double c3, double c2, double c0) {
  return SmoothField::autonomous(
      [=](const Vec2& z) { return Vec2(f1, c3 * std::pow(z.x(), 3) + c2 * z.x() * z.x() + c0); },
      [=](const Vec2& z) {
        Mat2 j;
        j << 0, 0, 3 * c3 * z.x() * z.x() + 2 * c2 * z.x(), 0;
        return j;
      });
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("folds, q_v and sigma range for alpha = 1 and alpha = 4") {
  for (double a : {1.0, 4.0}) {
    const double r = std::sqrt(a);
    const AnnulusData d = analyze_annulus(ham::f_minus(a), -3.0 * r, 3.0 * r);
    CHECK(d.folds.x_i == doctest::Approx(-r).epsilon(1e-12));
    CHECK(d.folds.x_v == doctest::Approx(r).epsilon(1e-12));
    CHECK(d.sigma_v == doctest::Approx(3.0 * r).epsilon(1e-10));
    CHECK(d.q_v.x() == doctest::Approx(-2.0 * r).epsilon(1e-10));
    CHECK(d.F2_qv == doctest::Approx(3.0 * a).epsilon(1e-9));
    CHECK(d.sigma_M == doctest::Approx(3.0 * r).epsilon(1e-9));
    CHECK(d.x_at_sigma_M == doctest::Approx(r).epsilon(1e-6));
  }
}

TEST_CASE("return time and its inverse against the bracketed oracle") {
  const AnnulusData d = analyze_annulus(ham::f_minus(1.0), -3.0, 3.0);
  for (double x : {-0.95, -0.5, 0.0, 0.5, 0.99}) {
    CHECK(half_return_time(d, x) == doctest::Approx(oracle::return_time(1.0, x)).epsilon(1e-10));
    CHECK(sigma_prime(d, x) == doctest::Approx(oracle::return_time_prime(1.0, x)).epsilon(1e-6));
  }
  for (double s : {0.5, 1.0, 2.0, 2.9}) {
    const auto roots = invert_sigma(d, s);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].x == doctest::Approx(oracle::inverse_return_time(1.0, s)).epsilon(1e-10));
    CHECK(roots[0].slope > 0.0);
  }
  CHECK(code_of([&] { invert_sigma(d, 3.5); }) == ErrorCode::NotInRange);
}

TEST_CASE("annulus orbit is reversible and closes") {
  const AnnulusData d = analyze_annulus(ham::f_minus(1.0), -3.0, 3.0);
  const AnnulusOrbit o = annulus_orbit(d, 0.3);
  CHECK((o.gamma(0.0) - Vec2(0.3, 0.0)).norm() < 1e-15);
  for (double t : {0.2, 0.9, 1.5}) CHECK((o.gamma(-t) - reflect(o.gamma(t))).norm() < 1e-14);
  CHECK((o.gamma(o.sigma_bar) - o.landing).norm() < 1e-12);
  CHECK(o.landing.y() == doctest::Approx(0.0));
}

TEST_CASE("hypothesis violations are diagnosed") {
  // Three zeros of F2.
  CHECK(code_of([] { analyze_annulus(poly_field(-1.0, 1.0, 0.0, 0.0), -2.0, 2.0); }) ==
        ErrorCode::ZeroCountMismatch);
  // No zeros.
  CHECK(code_of([] { analyze_annulus(poly_field(-1.0, 0.0, 1.0, 1.0), -2.0, 2.0); }) ==
        ErrorCode::ZeroCountMismatch);
  // F1 > 0 reverses the visibility pattern.
  CHECK(code_of([] { analyze_annulus(poly_field(1.0, 0.0, 1.0, -1.0), -2.0, 2.0); }) ==
        ErrorCode::HypothesisH1Violated);
}
