#include <doctest.h>

#include "twofold/ode.hpp"

#include <cmath>
#include <vector>

using namespace twofold;
using S2 = ode::State<2>;

namespace {
const ode::Rhs<2> oscillator = [](double, const S2& y) { return S2(y[1], -y[0]); };
}

TEST_CASE("harmonic oscillator to tolerance with dense output") {
  const auto r = ode::integrate<2>(oscillator, 0.0, S2(1.0, 0.0), 10.0, {}, {});
  CHECK(r.status == ode::Status::Completed);
  CHECK(std::abs(r.y[0] - std::cos(10.0)) < 1e-10);
  CHECK(r.dense(0.0) == S2(1.0, 0.0));
  for (double t : {0.013, 1.7, 4.4, 9.99}) {
    CHECK(std::abs(r.dense(t)[0] - std::cos(t)) < 1e-10);
    CHECK(std::abs(r.dense.derivative(t)[0] + std::sin(t)) < 1e-8);
  }
}

TEST_CASE("backward integration") {
  const auto r = ode::integrate<2>(oscillator, 0.0, S2(1.0, 0.0), -3.0, {}, {});
  CHECK(std::abs(r.y[0] - std::cos(3.0)) < 1e-10);
  CHECK(std::abs(r.y[1] - std::sin(3.0)) < 1e-10);
}

TEST_CASE("event location on a downward crossing") {
  // x = cos t falls through zero at pi/2.
  const std::vector<ode::EventFunction<2>> ev{{[](double, const S2& y) { return y[0]; }, false}};
  const auto r = ode::integrate<2>(oscillator, 0.0, S2(1.0, 0.0), 10.0, {}, ev);
  CHECK(r.status == ode::Status::Event);
  CHECK(r.event == 0);
  CHECK(std::abs(r.t - M_PI / 2) < 1e-11);
  CHECK(std::abs(r.y[0]) < 1e-11);
}

TEST_CASE("skip_initial_zero ignores a start on the surface") {
  // Starts at x = 0 moving down (x = -sin t): the next downward crossing of -x is at pi.
  const std::vector<ode::EventFunction<2>> ev{{[](double, const S2& y) { return -y[0]; }, true}};
  const auto r = ode::integrate<2>(oscillator, 0.0, S2(0.0, -1.0), 10.0, {}, ev);
  CHECK(r.status == ode::Status::Event);
  CHECK(std::abs(r.t - M_PI) < 1e-10);
}

TEST_CASE("grazing event is detected from the sampled minimum") {
  // g = (x - 1)^2 - 1e-8 is negative only on a window of width 2e-4 inside one step.
  const ode::Rhs<2> drift = [](double, const S2&) { return S2(1.0, 0.0); };
  const std::vector<ode::EventFunction<2>> ev{
      {[](double, const S2& y) { return (y[0] - 1.0) * (y[0] - 1.0) - 1e-8; }, false}};
  ode::Options opt;
  opt.h_max = 0.5;
  const auto r = ode::integrate<2>(drift, 0.0, S2(0.0, 0.0), 3.0, opt, ev);
  CHECK(r.status == ode::Status::Event);
  CHECK(std::abs(r.t - (1.0 - 1e-4)) < 1e-9);
}

TEST_CASE("domain escape and step limits") {
  const ode::Rhs<2> blowup = [](double, const S2& y) { return S2(y[0] * y[0], 0.0); };
  const auto r = ode::integrate<2>(blowup, 0.0, S2(1.0, 0.0), 2.0, {}, {});
  CHECK(r.status == ode::Status::DomainEscape);
  ode::Options few;
  few.max_steps = 3;
  const auto s = ode::integrate<2>(oscillator, 0.0, S2(1.0, 0.0), 10.0, few, {});
  CHECK(s.status == ode::Status::MaxSteps);
}
