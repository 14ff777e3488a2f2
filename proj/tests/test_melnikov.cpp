#include <doctest.h>

#include "oracles.hpp"

#include "twofold/hamiltonian.hpp"
#include "twofold/melnikov.hpp"
#include "twofold/predictor.hpp"

#include <cmath>
#include <numbers>

using namespace twofold;
namespace ham = twofold::hamiltonian;
using std::numbers::pi;

namespace {

const AnnulusData& data() {
  static const AnnulusData d = analyze_annulus(ham::f_minus(1.0), -3.0, 3.0);
  return d;
}

}  // namespace

TEST_CASE("autonomous forcing G- = (0, x - c) with G+ = 0") {
  const double c = -0.75;
  const SmoothField gm = SmoothField::autonomous([c](const Vec2& z) { return Vec2(0.0, z.x() - c); },
                                                 [](const Vec2&) {
                                                   Mat2 j;
                                                   j << 0, 0, 1, 0;
                                                   return j;
                                                 });
  const FilippovModel m = FilippovModel::reversible(ham::f_minus(1.0), gm, SmoothField::zero(), 2.0);
  for (double x : {-0.7, -0.1, 0.3, 0.8}) {
    const double sb = ham::sigma_bar(1.0, x);
    const double ref = sb * (sb / 2.0 - x + c);
    CHECK(melnikov_M(m, data(), 0.0, x).value == doctest::Approx(ref).epsilon(1e-9));
    const double energy = oracle::melnikov_energy(
        1.0, 0.0, x, [c](double, double xx, double) { return xx - c; }, [](double, double, double) { return 0.0; });
    CHECK(energy == doctest::Approx(ref).epsilon(1e-10));
  }
  const PredictionReport r = predict_autonomous(m, data());
  REQUIRE(r.predictions.size() == 1);
  CHECK(r.predictions[0].x == doctest::Approx((-3.0 + std::sqrt(21.0)) / 4.0).epsilon(1e-9));
}

TEST_CASE("periodic forcing against the energy-balance oracle") {
  for (double lam : {-0.5, 0.7, 3.0}) {
    const ham::Params p{1.0, lam, 1.7};
    const FilippovModel m = ham::make_model(p);
    for (double th : {0.0, 0.9, 2.5}) {
      for (double x : {-0.6, 0.2, 0.95}) {
        const MelnikovValue v = melnikov_M(m, data(), th, x);
        CHECK(v.value == doctest::Approx(oracle::melnikov_sine(1.0, lam, 1.7, th, x)).epsilon(1e-9));
        CHECK(v.error < 1e-8);
      }
    }
  }
}

TEST_CASE("lambda = -1 leaves only the odd part") {
  // G+ = -G- cancels the (1 + lambda) term; what remains vanishes on the resonant orbit.
  const double sigma = 2.0;
  const FilippovModel m = ham::make_model({1.0, -1.0, sigma});
  const std::vector<double> th{0.0, 1.0, 2.5};
  const std::vector<double> xs{-0.5, 0.0, 0.6, ham::x_sigma(1.0, sigma)};
  const MelnikovGrid g = melnikov_grid(m, data(), th, xs, 2);
  for (std::size_t i = 0; i < th.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double sb = oracle::return_time(1.0, xs[j]);
      const double want = -2.0 * sigma / pi * std::sin(pi * sb / sigma) * std::sin(pi * th[i] / sigma);
      CHECK(g.at(i, j) == doctest::Approx(want).epsilon(1e-9).scale(1.0));
    }
    CHECK(std::abs(g.at(i, xs.size() - 1)) < 1e-9);
  }
}

TEST_CASE("two-fold quantities at sigma = 3") {
  CHECK(twofold_prefactor(data()) == doctest::Approx(-3.0).epsilon(1e-12));
  for (double lam : {-1.5, 0.5, 2.0}) {
    const ham::Params p{1.0, lam, 3.0};
    const FilippovModel m = ham::make_model(p);
    for (double th : {0.4, 1.5, 2.2, 4.5}) {
      CHECK(g_theta(m, data(), th).value == doctest::Approx(ham::g_theta(p, th)).epsilon(1e-9));
      const FoldShift fs = fold_shift(m, data(), th);
      CHECK(fs.nu_v_minus == doctest::Approx(-std::sin(pi * th / 3.0) / 2.0).epsilon(1e-12));
      CHECK(fs.nu_i_minus == doctest::Approx(std::sin(pi * th / 3.0) / 2.0).epsilon(1e-12));
      const double thr = twofold_threshold(m, data(), th);
      CHECK(thr == doctest::Approx(-3.0 * std::max(lam * std::sin(pi * th / 3.0), std::sin(pi * th / 3.0))));
    }
  }
}

TEST_CASE("perturbed fold is first-order close to the shift") {
  const ham::Params p{1.0, -1.5, 3.0};
  for (double eps : {1e-2, 1e-3}) {
    const FilippovModel m = ham::make_model(p, eps);
    const double th = 1.2;
    const double nu = fold_shift(m, data(), th).nu_v_minus;
    const double x = perturbed_fold(m, Side::Minus, th, 1.0);
    CHECK(std::abs(x - (1.0 + eps * nu)) < 0.2 * eps * eps);
    CHECK(std::abs(m.normal(Side::Minus, th, x)) < 1e-13);
  }
}
