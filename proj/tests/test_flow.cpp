#include <doctest.h>

#include "twofold/error.hpp"
#include "twofold/hamiltonian.hpp"
#include "twofold/melnikov.hpp"

#include <cmath>
#include <sstream>
#include <string>

using namespace twofold;
namespace ham = twofold::hamiltonian;

TEST_CASE("first hit of the lower arc matches the return time") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  for (double x : {-0.8, -0.2, 0.4, 0.9}) {
    const HitResult h = hit_switching(m.f_minus, 0.0, Vec2(x, 0.0), Direction::Forward);
    CHECK(h.elapsed == doctest::Approx(ham::sigma_bar(1.0, x)).epsilon(1e-11));
    CHECK(h.point.x() == doctest::Approx(x - ham::sigma_bar(1.0, x)).epsilon(1e-11));
    CHECK(h.point.y() == 0.0);
  }
}

TEST_CASE("tangential arrival raises GrazingHit") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  try {
    hit_switching(m.f_minus, 0.0, Vec2(-2.0, 0.0), Direction::Backward);
    FAIL("expected GrazingHit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GrazingHit);
  }
}

TEST_CASE("variational flow carries the closed-form fundamental matrix") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  const VariationalSolution v = flow_variational(m.f_minus, 0.0, Vec2(0.3, 0.0), 2.0);
  for (double t : {0.0, 0.5, 1.3, 2.0}) {
    CHECK((v.fundamental(t) - ham::fundamental(t, 0.3)).norm() < 1e-11);
    CHECK((v.state(t) - ham::flow_minus(1.0, t, 0.3, 0.0)).norm() < 1e-11);
  }
}

TEST_CASE("unperturbed hybrid orbit crosses and conserves energy") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0});
  const double x0 = 0.3;
  const HybridTrajectory tr = flow_filippov(m, 0.0, Vec2(x0, 0.0), 4.0 * ham::sigma_bar(1.0, x0) + 0.1);
  CHECK(tr.events.size() == 4);
  for (const auto& e : tr.events) CHECK(e.kind == EventKind::CrossSigma);
  CHECK(!tr.has_sliding());
  const double h0 = ham::energy(1.0, Vec2(x0, 0.0));
  for (double t = 0.0; t < tr.t_end; t += 0.037) CHECK(std::abs(ham::energy(1.0, tr.state(t)) - h0) < 1e-8);
  // Closed orbit: back at the start after two loops.
  CHECK((tr.state(4.0 * ham::sigma_bar(1.0, x0)) - Vec2(x0, 0.0)).norm() < 1e-9);
}

TEST_CASE("sliding segment on the attracting strip ends at a fold") {
  const FilippovModel m = ham::make_model({1.0, -1.5, 3.0}, 0.05);
  const double th = 1.5446;
  const double x0 = perturbed_fold(m, Side::Minus, th, 1.0);
  HybridOptions opt;
  opt.stop_on = {EventKind::ExitSlidingAtFold};
  const HybridTrajectory tr = flow_filippov(m, th, Vec2(x0, 0.0), 9.0, {}, opt);
  REQUIRE(tr.stopped);
  CHECK(tr.has_sliding());
  CHECK(tr.events.back().kind == EventKind::ExitSlidingAtFold);
  CHECK(tr.sliding_time() > 0.0);
  for (const auto& seg : tr.segments) {
    if (seg.mode != Mode::Sliding) continue;
    for (const auto& st : seg.dense.steps()) CHECK(std::abs(st.r1[1]) < 1e-12);
  }

  std::ostringstream os;
  tr.write_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x,y,mode,event_flag\n", 0) == 0);
  CHECK(csv.find(",sliding,") != std::string::npos);
  CHECK(csv.find(",3\n") != std::string::npos);
}

TEST_CASE("backward hybrid run retraces a forward crossing orbit") {
  const FilippovModel m = ham::make_model({1.0, 2.0, 2.0}, 0.01);
  const HybridTrajectory fw = flow_filippov(m, 0.4, Vec2(0.2, -0.1), 5.0);
  HybridOptions back;
  back.direction = Direction::Backward;
  const HybridTrajectory bw = flow_filippov(m, fw.t_end, fw.z_end, 5.0, {}, back);
  CHECK((bw.z_end - Vec2(0.2, -0.1)).norm() < 1e-8);
}
