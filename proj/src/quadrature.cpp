#include "twofold/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>

namespace twofold {

namespace {

struct Panel {
  Vec2 kronrod;
  Vec2 gauss;
};

Panel gk15_panel(const std::function<Vec2(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const Vec2 f0 = f(c);
  Vec2 k = wk[0] * f0;
  Vec2 g = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const Vec2 s = f(c - r * xk[i]) + f(c + r * xk[i]);
    k += wk[i] * s;
    // The 7-point Gauss nodes sit at the even Kronrod indices.
    if (i % 2 == 0) g += wg[i / 2] * s;
  }
  return {r * k, r * g};
}

void adapt(const std::function<Vec2(double)>& f, double a, double b, double tol, int depth, QuadResult& out) {
  const Panel p = gk15_panel(f, a, b);
  const double err = (p.kronrod - p.gauss).norm();
  if (err <= tol || depth <= 0) {
    out.value += p.kronrod;
    out.error += err;
    ++out.panels;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth - 1, out);
  adapt(f, m, b, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadResult integrate_gk15(const std::function<Vec2(double)>& f, std::span<const double> breaks, double tol,
                          int max_depth) {
  QuadResult out;
  if (breaks.size() < 2) return out;
  const double total = std::abs(breaks.back() - breaks.front());
  if (total == 0.0) return out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (a == b) continue;
    adapt(f, a, b, tol * std::abs(b - a) / total, max_depth, out);
  }
  return out;
}

QuadResult integrate_gk15(const std::function<Vec2(double)>& f, double a, double b, double tol) {
  const std::array<double, 2> br{a, b};
  return integrate_gk15(f, br, tol);
}

}  // namespace twofold
