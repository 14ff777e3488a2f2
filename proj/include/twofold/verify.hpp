#pragma once

#include "twofold/annulus.hpp"
#include "twofold/flow.hpp"
#include "twofold/predictor.hpp"

#include <optional>
#include <vector>

namespace twofold {

/// State after one forcing period 2 sigma of the hybrid flow started at (theta0, z0).
Vec2 stroboscopic_map(const FilippovModel& model, double theta0, const Vec2& z0, const Tolerances& tol = {});

struct FixedPointOptions {
  double tol_fp = 1e-10;
  int max_iter = 40;
};

struct FixedPointResult {
  double theta_fix = 0.0;  // phase at which the periodic solution leaves y = 0 downward
  Vec2 z_fix = Vec2::Zero();
  double section_time = 0.0;  // phase of the interior section used by Newton
  Vec2 section_point = Vec2::Zero();
  double residual = 0.0;
  double distance = 0.0;  // |(theta_fix, x_fix) - seed|, phase taken modulo 2 sigma
  double epsilon = 0.0;
  int iterations = 0;
};

/// Newton on z -> P(z) - z for the period map P sampled at the interior phase
/// theta_s + delta, where delta is half the lower-arc time from the seed.
FixedPointResult find_fixed_point(const FilippovModel& model, double theta_seed, double x_seed,
                                  const Tolerances& tol = {}, const FixedPointOptions& opt = {});

struct Displacement {
  double F1 = 0.0;  // t- - t+ - 2 sigma
  double F2 = 0.0;  // x- - x+
  double t_minus = 0.0;
  double t_plus = 0.0;  // signed (negative) backward hit time
  double x_minus = 0.0;
  double x_plus = 0.0;
};

/// X- forward from (theta, (x, 0)) and X+ backward from (theta + 2 sigma, (x, 0))
/// to their first hits of y = 0.
Displacement displacement_annulus(const FilippovModel& model, double theta, double x, double eps,
                                  const Tolerances& tol = {});

struct SlidingCycleReport {
  bool time_reversed = false;
  double theta0 = 0.0;  // start phase (in the reversed model when time_reversed)
  double x0 = 0.0;      // perturbed fold abscissa at theta0
  bool has_sliding = false;
  bool sliding_region_ok = false;  // every sliding point lies in the attracting strip
  double sliding_time = 0.0;
  double theta_exit = 0.0;
  double x_exit = 0.0;
  Mode exit_to = Mode::Below;  // side entered when the strip ends at the fold
  double phase_mismatch = 0.0;  // theta_exit - theta0 - 2 sigma
  double x_mismatch = 0.0;
  double closure = 0.0;  // hypot of the two mismatches
  double tau_eps = 0.0;  // -sliding_time / eps
  std::optional<double> tau_star;
  HybridTrajectory trajectory;
};

/// Starts on the perturbed visible fold of X- at phase theta0 and follows the
/// hybrid flow until it leaves the sliding strip at the fold. For an escaping
/// strip (G2+ > G2-) the run uses the time-reversed model.
SlidingCycleReport verify_sliding_cycle(const FilippovModel& model, const AnnulusData& data, double theta0,
                                        double eps, const Tolerances& tol = {});

struct SlidingCycleSearch {
  double half_width = 3.0;   // scan theta* +- half_width * eps
  double step = 0.04;        // scan step in units of eps
  double tol_theta = 1e-10;  // bracket width for the closing phase
};

struct SlidingCycle {
  double theta_star = 0.0;  // predicted start phase (original model)
  double theta_eps = 0.0;   // start phase of the closed sliding cycle
  double x_eps = 0.0;
  double offset = 0.0;  // hypot(theta_eps - theta*, x_eps - x_v)
  double closure = 0.0;  // residual closure of the cycle at theta_eps
  int sliding_samples = 0;  // scan points that produced a returning sliding run
  SlidingCycleReport report;
};

/// Scans start phases near theta* for runs that slide and return to X-, then
/// brackets the zero of the phase mismatch. Throws NoSlidingSegment when the
/// scan finds no sign change.
SlidingCycle locate_sliding_cycle(const FilippovModel& model, const AnnulusData& data, double theta_star,
                                  double eps, const Tolerances& tol = {}, const SlidingCycleSearch& opt = {});

struct FirstVariationReport {
  Vec2 psi = Vec2::Zero();
  std::vector<double> epsilons;
  std::vector<double> errors;  // |xi - Gamma - eps psi|
  double order = 0.0;          // least-squares slope of log error vs log eps
};

/// psi(t) = Y(t, z0) (z1 + int_0^t Y(s, z0)^-1 G(s + theta0, Gamma(s, z0)) ds)
/// compared against the perturbed flow from z0 + eps z1.
FirstVariationReport first_variation(const FilippovModel& model, Side side, double theta0, const Vec2& z0,
                                     const Vec2& z1, double t, const std::vector<double>& epsilons,
                                     const Tolerances& tol = {});

/// Least-squares slope of log(y) against log(x).
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twofold
