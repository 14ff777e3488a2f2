#pragma once

#include "twofold/fields.hpp"
#include "twofold/flow.hpp"

#include <memory>
#include <vector>

namespace twofold {

struct FoldPoints {
  double x_i = 0.0;  // invisible fold
  double x_v = 0.0;  // visible fold
  double dF2dx_i = 0.0;
  double dF2dx_v = 0.0;
  double F1_i = 0.0;
  double F1_v = 0.0;
};

/// Zeros of x -> F2(x, 0) on [x_lo, x_hi] checked against the fold pattern:
/// exactly two simple zeros x_i < x_v with dF2/dx * F1 > 0 at x_i, < 0 at x_v
/// and F1(p_v) < 0.
FoldPoints find_folds(const SmoothField& f_minus, double x_lo, double x_hi, const Tolerances& tol = {});

/// Lower arc Gamma-(t, x, 0) on [0, sigma_bar(x)] with its fundamental matrix,
/// closed into the annulus orbit by the reflected upper arc.
struct AnnulusOrbit {
  double x = 0.0;
  double sigma_bar = 0.0;
  Vec2 landing = Vec2::Zero();  // gamma(sigma_bar)
  double landing_speed = 0.0;   // F2 at the landing point
  VariationalSolution lower;

  /// gamma(t, x) for t in [-sigma_bar, sigma_bar].
  Vec2 gamma(double t) const;
  /// Y(t, x, 0) for t in [0, sigma_bar].
  Mat2 Y(double t) const { return lower.fundamental(t); }
};

struct AnnulusData {
  SmoothField f_minus;
  Tolerances tol;
  FoldPoints folds;
  Vec2 p_i = Vec2::Zero();
  Vec2 p_v = Vec2::Zero();
  Vec2 q_v = Vec2::Zero();
  double F2_qv = 0.0;
  double sigma_v = 0.0;  // sigma_bar(x_v)
  double sigma_M = 0.0;  // sup of sigma_bar
  double x_at_sigma_M = 0.0;
  std::shared_ptr<const AnnulusOrbit> cycle;  // orbit through p_v
};

AnnulusData analyze_annulus(const SmoothField& f_minus, double x_lo, double x_hi, const Tolerances& tol = {});

double half_return_time(const AnnulusData& data, double x);
double sigma_prime(const AnnulusData& data, double x);
AnnulusOrbit annulus_orbit(const AnnulusData& data, double x);

struct SigmaRoot {
  double x = 0.0;
  double slope = 0.0;  // sigma_bar'(x)
};

/// All roots of sigma_bar(x) = sigma on (x_i, x_v], bracketed on a grid and
/// polished by safeguarded Newton.
std::vector<SigmaRoot> invert_sigma(const AnnulusData& data, double sigma, int grid = 512);

}  // namespace twofold
