#pragma once

// Piecewise-Hamiltonian two-fold model H(x, y) = |y| - x^3/3 + alpha x with
// F-(x, y) = (-1, x^2 - alpha), G-(t) = (0, sin(pi t / sigma)) and
// G+(t) = (0, lambda sin(pi t / sigma)). Everything below is closed form.

#include "twofold/fields.hpp"
#include "twofold/predictor.hpp"

#include <vector>

namespace twofold::hamiltonian {

struct Params {
  double alpha = 1.0;
  double lambda = 2.0;
  double sigma = 2.0;
};

FilippovModel make_model(const Params& p, double epsilon = 0.0);
SmoothField f_minus(double alpha);

Vec2 flow_minus(double alpha, double t, double x, double y);
Mat2 fundamental(double t, double x);
/// gamma(t, x) on [-sigma_bar(x), sigma_bar(x)].
Vec2 gamma(double alpha, double t, double x);

/// sigma_bar(x) = (3x + sqrt(3) sqrt(4 alpha - x^2)) / 2 on (-sqrt(alpha), sqrt(alpha)].
double sigma_bar(double alpha, double x);
double sigma_bar_prime(double alpha, double x);
/// Inverse of sigma_bar for sigma in (0, 3 sqrt(alpha)].
double x_sigma(double alpha, double sigma);

/// M(theta, x) = (sigma/pi) [cos(pi(sb + theta)/sigma) + lambda cos(pi(sb - theta)/sigma)
///               - (1 + lambda) cos(pi theta / sigma)], sb = sigma_bar(x).
double melnikov(const Params& p, double theta, double x);
/// The same expression with lambda on the first cosine instead; equals melnikov(p, -theta, x).
double melnikov_lambda_swapped(const Params& p, double theta, double x);
/// M(theta, x_sigma) = -(2 (1 + lambda) sigma / pi) cos(pi theta / sigma).
double melnikov_at_x_sigma(const Params& p, double theta);

/// g_theta = (6 sqrt(alpha) (1 - lambda) / pi) cos(pi theta / (3 sqrt(alpha))).
double g_theta(const Params& p, double theta);

/// sqrt(36a + 2s(sqrt(36a - 3s^2) - s)) - (s + sqrt(36a - 3s^2)); zero for s in (0, 3 sqrt(a)].
double simplification_defect(double alpha, double sigma);

double energy(double alpha, const Vec2& z);

struct TableEntry {
  double theta = 0.0;
  Classification kind = Classification::Inconclusive;
};

/// Expected two-fold outcomes at theta* in {3 sqrt(alpha)/2, 9 sqrt(alpha)/2}
/// for sigma = 3 sqrt(alpha). Empty for lambda = -1.
std::vector<TableEntry> twofold_case_table(const Params& p);

}  // namespace twofold::hamiltonian
