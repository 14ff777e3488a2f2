#pragma once

#include "twofold/annulus.hpp"
#include "twofold/fields.hpp"

#include <vector>

namespace twofold {

/// {G-, G+}_theta(t, z) = G-(t + theta, z) + R G+(-t + theta, Rz).
Vec2 rev_defect(const FilippovModel& model, double theta, double t, const Vec2& z);

struct MelnikovValue {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate
};

/// M(theta, x) = F(gamma(sigma_bar)) ^ [Y(sigma_bar) int_0^sigma_bar Y^-1 {G-,G+}_theta(t, gamma) dt].
MelnikovValue melnikov_M(const FilippovModel& model, const AnnulusOrbit& orbit, double theta, double tol_quad = 1e-9);
MelnikovValue melnikov_M(const FilippovModel& model, const AnnulusData& data, double theta, double x,
                         double tol_quad = 1e-9);

struct MelnikovGrid {
  std::vector<double> thetas;
  std::vector<double> xs;
  std::vector<double> values;  // values[i * xs.size() + j] = M(thetas[i], xs[j])
  std::vector<double> errors;

  double at(std::size_t i, std::size_t j) const { return values[i * xs.size() + j]; }
};

/// Grid evaluation; orbits are built once per x and the x columns are split
/// across `jobs` threads.
MelnikovGrid melnikov_grid(const FilippovModel& model, const AnnulusData& data, std::vector<double> thetas,
                           std::vector<double> xs, int jobs = 1, double tol_quad = 1e-9);

/// g_theta = <row 2 of Y(sigma_v, p_v), int_0^sigma_v Y^-1 (G-(t+theta, Gamma) - R G+(-t+theta, R Gamma)) dt>.
MelnikovValue g_theta(const FilippovModel& model, const AnnulusData& data, double theta, double tol_quad = 1e-9);

/// First-order displacement of the fold points, nu = -G2(theta, p) / dF2/dx(p).
struct FoldShift {
  double nu_v_minus = 0.0;
  double nu_v_plus = 0.0;
  double nu_i_minus = 0.0;
  double nu_i_plus = 0.0;
};

FoldShift fold_shift(const FilippovModel& model, const AnnulusData& data, double theta);

/// Fold abscissa of side `side` at phase theta for the model's epsilon, found
/// by Newton on x -> X2(theta, x, 0) from x_guess.
double perturbed_fold(const FilippovModel& model, Side side, double theta, double x_guess);

/// 2 F2(q_v) / (F1(p_v) dF2/dx(p_v)).
double twofold_prefactor(const AnnulusData& data);

/// prefactor * max{G2+(theta, p_v), G2-(theta, p_v)}.
double twofold_threshold(const FilippovModel& model, const AnnulusData& data, double theta);

}  // namespace twofold
