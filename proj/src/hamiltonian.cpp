#include "twofold/hamiltonian.hpp"

#include "twofold/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twofold::hamiltonian {

using std::numbers::pi;

SmoothField f_minus(double alpha) {
  return SmoothField::autonomous([alpha](const Vec2& z) { return Vec2(-1.0, z.x() * z.x() - alpha); },
                                 [](const Vec2& z) {
                                   Mat2 j;
                                   j << 0.0, 0.0, 2.0 * z.x(), 0.0;
                                   return j;
                                 });
}

FilippovModel make_model(const Params& p, double epsilon) {
  const double s = p.sigma, lam = p.lambda;
  const auto zero_jac = [](double, const Vec2&) { return Mat2::Zero().eval(); };
  SmoothField gm = SmoothField::periodic([s](double t, const Vec2&) { return Vec2(0.0, std::sin(pi * t / s)); },
                                         zero_jac, 2.0 * s);
  SmoothField gp = SmoothField::periodic(
      [s, lam](double t, const Vec2&) { return Vec2(0.0, lam * std::sin(pi * t / s)); }, zero_jac, 2.0 * s);
  return FilippovModel::reversible(f_minus(p.alpha), gm, gp, s, epsilon);
}

Vec2 flow_minus(double alpha, double t, double x, double y) {
  return {-t + x, (t * t * t - 3.0 * t * t * x + 3.0 * t * x * x + 3.0 * y - 3.0 * t * alpha) / 3.0};
}

Mat2 fundamental(double t, double x) {
  Mat2 y;
  y << 1.0, 0.0, -t * t + 2.0 * t * x, 1.0;
  return y;
}

Vec2 gamma(double alpha, double t, double x) {
  if (t >= 0.0) return flow_minus(alpha, t, x, 0.0);
  return reflect(flow_minus(alpha, -t, x, 0.0));
}

namespace {

void check_x(double alpha, double x) {
  const double r = std::sqrt(alpha);
  if (!(x > -r && x <= r * (1.0 + 1e-15))) {
    std::ostringstream os;
    os << "x=" << x << " outside (-sqrt(alpha), sqrt(alpha)]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
}

}  // namespace

double sigma_bar(double alpha, double x) {
  check_x(alpha, x);
  return 0.5 * (3.0 * x + std::sqrt(3.0) * std::sqrt(std::max(0.0, 4.0 * alpha - x * x)));
}

double sigma_bar_prime(double alpha, double x) {
  check_x(alpha, x);
  return 0.5 * (3.0 - std::sqrt(3.0) * x / std::sqrt(4.0 * alpha - x * x));
}

double x_sigma(double alpha, double sigma) {
  const double top = 3.0 * std::sqrt(alpha);
  if (!(sigma > 0.0 && sigma <= top * (1.0 + 1e-15))) {
    std::ostringstream os;
    os << "sigma=" << sigma << " outside (0, 3 sqrt(alpha)]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  return (3.0 * sigma - std::sqrt(3.0) * std::sqrt(std::max(0.0, 12.0 * alpha - sigma * sigma))) / 6.0;
}

double melnikov(const Params& p, double theta, double x) {
  const double sb = sigma_bar(p.alpha, x);
  const double s = p.sigma;
  return s / pi *
         (std::cos(pi * (sb + theta) / s) + p.lambda * std::cos(pi * (sb - theta) / s) -
          (1.0 + p.lambda) * std::cos(pi * theta / s));
}

double melnikov_lambda_swapped(const Params& p, double theta, double x) {
  const double sb = sigma_bar(p.alpha, x);
  const double s = p.sigma;
  return s / pi *
         (p.lambda * std::cos(pi * (sb + theta) / s) + std::cos(pi * (sb - theta) / s) -
          (1.0 + p.lambda) * std::cos(pi * theta / s));
}

double melnikov_at_x_sigma(const Params& p, double theta) {
  return -2.0 * (1.0 + p.lambda) * p.sigma / pi * std::cos(pi * theta / p.sigma);
}

double g_theta(const Params& p, double theta) {
  const double ra = std::sqrt(p.alpha);
  return 6.0 * ra * (1.0 - p.lambda) / pi * std::cos(pi * theta / (3.0 * ra));
}

double simplification_defect(double alpha, double sigma) {
  const double r = std::sqrt(36.0 * alpha - 3.0 * sigma * sigma);
  return std::sqrt(36.0 * alpha + 2.0 * sigma * (r - sigma)) - (sigma + r);
}

double energy(double alpha, const Vec2& z) { return std::abs(z.y()) - z.x() * z.x() * z.x() / 3.0 + alpha * z.x(); }

std::vector<TableEntry> twofold_case_table(const Params& p) {
  const double ra = std::sqrt(p.alpha);
  const double t1 = 1.5 * ra, t2 = 4.5 * ra;
  const double lam = p.lambda;
  using C = Classification;
  if (lam == -1.0) return {};
  if (lam < 0.0) return {{t1, C::SlidingOnSigmaS}, {t2, C::SlidingOnSigmaE}};
  if (lam == 0.0) return {{t1, C::SlidingOnSigmaS}, {t2, C::Inconclusive}};
  if (lam < 1.0) return {{t1, C::SlidingOnSigmaS}, {t2, C::CrossingTwoFold}};
  if (lam == 1.0) return {{t1, C::Inconclusive}, {t2, C::CrossingTwoFold}};
  return {{t1, C::SlidingOnSigmaE}, {t2, C::CrossingTwoFold}};
}

}  // namespace twofold::hamiltonian
