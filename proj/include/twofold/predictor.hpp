#pragma once

#include "twofold/annulus.hpp"
#include "twofold/melnikov.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twofold {

struct MelnikovZero {
  double theta = 0.0;  // or abscissa, for the autonomous case
  double slope = 0.0;
};

struct ZeroOptions {
  int nodes = 128;
  double tol_zero = 1e-10;
  double tol_slope = 1e-8;
  double fd_step = 0.0;  // central-difference step; 0 selects 1e-6 * period / 2
};

/// Simple zeros of a 2 sigma-periodic function: sign changes on a uniform
/// grid refined by safeguarded Newton. Throws NoZeros or NonSimpleZero.
std::vector<MelnikovZero> find_melnikov_zeros(const std::function<double(double)>& m, double period,
                                              const ZeroOptions& opt = {});

/// Same on a closed interval [a, b] (no wrap-around).
std::vector<MelnikovZero> find_zeros_on_interval(const std::function<double(double)>& f, double a, double b,
                                                 const ZeroOptions& opt = {});

enum class Classification { CrossingAnnulus, CrossingTwoFold, SlidingOnSigmaS, SlidingOnSigmaE, Inconclusive };

std::string_view to_string(Classification c);

struct SlowFast {
  double p = 0.0;
  double m1 = 0.0;
  double A = 0.0;
  double nu_v_minus = 0.0;
  double F1_pv = 0.0;
  bool repelling = false;  // p > 0

  /// k(tau) = m1 + (F1(p_v) / p) exp(tau p).
  double k(double tau) const;
};

SlowFast slowfast_quantities(const FilippovModel& model, const AnnulusData& data, double theta);

/// tau* = -A - W(exp(-A p)) / p; throws PositiveTau when A p <= -1.
double tau_star(const SlowFast& sf);

struct TwoFoldResult {
  Classification kind = Classification::Inconclusive;
  double g = 0.0;
  double threshold = 0.0;
  double G2_plus = 0.0;
  double G2_minus = 0.0;
  double chi_star = 0.0;  // crossing only
  std::optional<SlowFast> slowfast;
  std::optional<double> tau_star;
  bool time_reversed = false;  // slow-fast data computed on the reversed model
  double reversed_theta = 0.0;
};

/// Crossing vs sliding dichotomy at a simple zero theta* of M(., x_v). Throws
/// Inconclusive when g is within tol_margin of the threshold.
TwoFoldResult classify_twofold(const FilippovModel& model, const AnnulusData& data, double theta_star);

struct Prediction {
  double theta = 0.0;
  double x = 0.0;
  double slope = 0.0;
  Classification kind = Classification::Inconclusive;
  std::optional<TwoFoldResult> twofold;
  std::string note;
};

struct PredictionReport {
  double sigma = 0.0;
  double x_star = 0.0;
  std::vector<Prediction> predictions;
  std::vector<std::string> notes;
};

/// Crossing solutions near (theta*, (x_sigma, 0)) for sigma in (0, sigma_v).
PredictionReport predict_annulus(const FilippovModel& model, const AnnulusData& data, double sigma,
                                 const ZeroOptions& opt = {});

/// Predictions at the two-fold cycle; the model's sigma must equal sigma_v.
PredictionReport predict_twofold(const FilippovModel& model, const AnnulusData& data, const ZeroOptions& opt = {});

/// Autonomous perturbations: simple zeros of x -> M(x) on (x_i, x_v).
PredictionReport predict_autonomous(const FilippovModel& model, const AnnulusData& data, int nodes = 64,
                                    const ZeroOptions& opt = {});

}  // namespace twofold
