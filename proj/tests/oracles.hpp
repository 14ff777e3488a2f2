#pragma once

// Reference values computed independently of the library: roots by bracketing,
// Melnikov values by energy balance along the unperturbed orbit, all with
// Boost quadrature and root finders.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <utility>

namespace oracle {

using std::numbers::pi;

// H(x, y) = |y| - x^3/3 + a x; the lower arc from (x0, 0) solves x' = -1, y' = x^2 - a.
inline std::pair<double, double> lower_arc(double a, double t, double x0) {
  const double x = x0 - t;
  // y(t) = int_0^t ((x0 - s)^2 - a) ds
  const double y = (std::pow(x0, 3) - std::pow(x, 3)) / 3.0 - a * t;
  return {x, y};
}

// Return time of the lower arc to y = 0, by bracketing y(t) on (0, 6 sqrt(a)].
inline double return_time(double a, double x0) {
  auto y = [&](double t) { return lower_arc(a, t, x0).second; };
  // y < 0 just after t = 0 when x0^2 < a; scan for the sign change.
  const double hi_lim = 6.0 * std::sqrt(a);
  const int n = 4000;
  double lo = hi_lim / n;
  for (int k = 2; k <= n; ++k) {
    const double t = hi_lim * k / n;
    if (y(t) >= 0.0) {
      std::uintmax_t it = 200;
      const auto r = boost::math::tools::toms748_solve(
          y, lo, t, [](double l, double h) { return std::abs(h - l) < 1e-15; }, it);
      return 0.5 * (r.first + r.second);
    }
    lo = t;
  }
  return std::nan("");
}

// d/dx of the return time by a central difference of the bracketed root.
inline double return_time_prime(double a, double x0, double h = 1e-5) {
  return (return_time(a, x0 + h) - return_time(a, x0 - h)) / (2.0 * h);
}

// x with return_time(a, x) = s, by bracketing on [-0.9 sqrt(a), sqrt(a)]; the
// return time is 0 at -sqrt(a) and about 0.3 sqrt(a) at the left end.
inline double inverse_return_time(double a, double s) {
  const double r = std::sqrt(a);
  std::uintmax_t it = 200;
  const auto res = boost::math::tools::toms748_solve(
      [&](double x) { return return_time(a, x) - s; }, -0.9 * r, r,
      [](double l, double h) { return std::abs(h - l) < 1e-14; }, it);
  return 0.5 * (res.first + res.second);
}

template <class F>
double integrate(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, 1e-13);
}

// Energy gained over one loop of the unperturbed annulus orbit through (x0, 0):
// grad H . G- along the lower arc (dH/dy = -1) plus grad H . G+ along the
// reflected upper arc (dH/dy = +1) traversed on [-sigma_bar, 0].
// gm2(t, x, y) and gp2(t, x, y) are the second components of G- and G+.
inline double melnikov_energy(double a, double theta, double x0,
                              const std::function<double(double, double, double)>& gm2,
                              const std::function<double(double, double, double)>& gp2) {
  const double sb = return_time(a, x0);
  const double lower = integrate(
      [&](double t) {
        const auto [x, y] = lower_arc(a, t, x0);
        return -gm2(t + theta, x, y);
      },
      0.0, sb);
  const double upper = integrate(
      [&](double t) {
        const auto [x, y] = lower_arc(a, -t, x0);
        return gp2(t + theta, x, -y);
      },
      -sb, 0.0);
  return lower + upper;
}

inline double melnikov_sine(double a, double lambda, double sigma, double theta, double x0) {
  return melnikov_energy(
      a, theta, x0, [&](double t, double, double) { return std::sin(pi * t / sigma); },
      [&](double t, double, double) { return lambda * std::sin(pi * t / sigma); });
}

// Y' = DF Y with DF = [[0, 0], [2x, 0]] along the lower arc gives Y = [[1, 0], [Y21, 1]],
// Y21(t) = int_0^t 2 (x0 - s) ds.
inline double fundamental_21(double t, double x0) { return 2.0 * x0 * t - t * t; }

// W(y) by bisection on w e^w = y, for y >= 0.
inline double lambert_bisect(double y) {
  double lo = -1.0, hi = std::max(1.0, std::log1p(y) + 1.0);
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    (m * std::exp(m) < y ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
