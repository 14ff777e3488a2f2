#include <doctest.h>

#include "twofold/error.hpp"
#include "twofold/hamiltonian.hpp"
#include "twofold/verify.hpp"

#include <cmath>
#include <vector>

using namespace twofold;
namespace ham = twofold::hamiltonian;

TEST_CASE("fitted order of a power law") {
  const std::vector<double> x{1e-1, 1e-2, 1e-3};
  CHECK(fitted_order(x, {3e-2, 3e-4, 3e-6}) == doctest::Approx(2.0));
  CHECK(fitted_order({1.0}, {1.0}) == 0.0);
}

TEST_CASE("unperturbed period map fixes the resonant orbit") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  const double x = ham::x_sigma(1.0, 2.0);
  CHECK((stroboscopic_map(m, 0.3, Vec2(x, 0.0)) - Vec2(x, 0.0)).norm() < 1e-9);
  CHECK((stroboscopic_map(m, 0.3, Vec2(0.5, 0.0)) - Vec2(0.5, 0.0)).norm() > 1e-2);
}

TEST_CASE("displacement reduces to the return-time mismatch at eps = 0") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  for (double x : {-0.4, 0.1, 0.7}) {
    const Displacement d = displacement_annulus(m, 0.5, x, 0.0);
    CHECK(d.F1 == doctest::Approx(2.0 * ham::sigma_bar(1.0, x) - 4.0).epsilon(1e-10));
    CHECK(std::abs(d.F2) < 1e-11);
  }
}

TEST_CASE("fixed point of the period map near a crossing prediction") {
  const FilippovModel m = ham::make_model({1.0, 0.5, 2.0}, 1e-2);
  const FixedPointResult fp = find_fixed_point(m, 1.0, ham::x_sigma(1.0, 2.0));
  CHECK(fp.residual <= 1e-10);
  CHECK(fp.distance <= 10 * 1e-2);
  CHECK((stroboscopic_map(m, fp.section_time, fp.section_point) - fp.section_point).norm() < 1e-9);
}

TEST_CASE("sliding cycles on both strips") {
  const AnnulusData d = analyze_annulus(ham::f_minus(1.0), -3.0, 3.0);
  const FilippovModel m = ham::make_model({1.0, -1.5, 3.0});
  const SlidingCycle s = locate_sliding_cycle(m, d, 1.5, 0.02);
  CHECK(!s.report.time_reversed);
  CHECK(s.report.has_sliding);
  CHECK(s.report.sliding_region_ok);
  CHECK(s.closure < 1e-8);
  CHECK(s.offset < 2.0 * 0.02);
  const SlidingCycle e = locate_sliding_cycle(m, d, 4.5, 0.02);
  CHECK(e.report.time_reversed);
  CHECK(e.report.has_sliding);
  CHECK(e.closure < 1e-8);
  // The limit closure time is the one predicted at theta*, on either strip.
  for (const SlidingCycle* c : {&s, &e}) {
    const auto pred = classify_twofold(m, d, c->theta_star);
    REQUIRE(c->report.tau_star.has_value());
    CHECK(*c->report.tau_star == doctest::Approx(*pred.tau_star).epsilon(1e-12));
    CHECK(std::abs(c->report.tau_eps - *pred.tau_star) < 0.1);
  }
  // Far from any prediction there is nothing to close.
  CHECK_THROWS_AS(locate_sliding_cycle(m, d, 0.3, 0.02), Error);
}

TEST_CASE("first variation is second-order accurate") {
  const FilippovModel m = ham::make_model({1.0, -0.5, 1.5});
  const FirstVariationReport r =
      first_variation(m, Side::Plus, 0.4, Vec2(0.1, 0.2), Vec2(0.3, -0.2), 1.2, {1e-1, 5e-2, 2.5e-2});
  CHECK(r.order > 1.9);
  CHECK(r.errors.size() == 3);
}
