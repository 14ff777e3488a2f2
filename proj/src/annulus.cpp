#include "twofold/annulus.hpp"

#include "twofold/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <sstream>

namespace twofold {

namespace {

// Newton on a bracketed sign change with bisection fallback.
template <class F, class DF>
double bracketed_newton(const F& f, const DF& df, double a, double b, double tol_f, int max_iter = 100) {
  double fa = f(a);
  double x = 0.5 * (a + b);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= tol_f) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double d = df(x);
    double xn = d != 0.0 ? x - fx / d : 0.5 * (a + b);
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

}  // namespace

FoldPoints find_folds(const SmoothField& f_minus, double x_lo, double x_hi, const Tolerances& tol) {
  const int n = 512;
  auto f2 = [&](double x) { return f_minus(0.0, Vec2(x, 0.0)).y(); };
  auto df2 = [&](double x) { return f_minus.jacobian(0.0, Vec2(x, 0.0))(1, 0); };
  std::vector<double> roots;
  double xa = x_lo, fa = f2(xa);
  for (int k = 1; k <= n; ++k) {
    const double xb = x_lo + (x_hi - x_lo) * k / n;
    const double fb = f2(xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      roots.push_back(bracketed_newton(f2, df2, xa, xb, 1e-15));
    }
    xa = xb;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(xa);
  if (roots.size() != 2) {
    std::ostringstream os;
    os << "F2(x,0) has " << roots.size() << " zeros on [" << x_lo << ", " << x_hi << "], expected 2";
    throw Error(ErrorCode::ZeroCountMismatch, os.str());
  }
  FoldPoints fp;
  fp.x_i = roots[0];
  fp.x_v = roots[1];
  fp.dF2dx_i = df2(fp.x_i);
  fp.dF2dx_v = df2(fp.x_v);
  fp.F1_i = f_minus(0.0, Vec2(fp.x_i, 0.0)).x();
  fp.F1_v = f_minus(0.0, Vec2(fp.x_v, 0.0)).x();
  if (std::abs(fp.dF2dx_i) <= tol.tangency || std::abs(fp.dF2dx_v) <= tol.tangency) {
    throw Error(ErrorCode::HypothesisH1Violated, "fold is not simple (dF2/dx vanishes)");
  }
  if (!(fp.dF2dx_v * fp.F1_v < 0.0)) {
    throw Error(ErrorCode::HypothesisH1Violated, "dF2/dx(p_v) * F1(p_v) < 0 fails at x=" + std::to_string(fp.x_v));
  }
  if (!(fp.dF2dx_i * fp.F1_i > 0.0)) {
    throw Error(ErrorCode::HypothesisH1Violated, "dF2/dx(p_i) * F1(p_i) > 0 fails at x=" + std::to_string(fp.x_i));
  }
  if (!(fp.F1_v < 0.0)) {
    throw Error(ErrorCode::HypothesisH1Violated, "F1(p_v) < 0 fails (orientation reversed)");
  }
  return fp;
}

Vec2 AnnulusOrbit::gamma(double t) const {
  if (t >= 0.0) return lower.state(std::min(t, sigma_bar));
  return reflect(lower.state(std::min(-t, sigma_bar)));
}

namespace {

AnnulusOrbit build_orbit(const SmoothField& f, double x, const Tolerances& tol) {
  VariationalHit vh = hit_switching_variational(f, 0.0, Vec2(x, 0.0), Direction::Forward, tol);
  AnnulusOrbit o;
  o.x = x;
  o.sigma_bar = vh.hit.elapsed;
  o.landing = vh.hit.point;
  o.landing_speed = vh.hit.normal_speed;
  o.lower = std::move(vh.solution);
  return o;
}

void check_domain(const AnnulusData& d, double x) {
  const double slack = 1e-12 * std::max(1.0, std::abs(d.folds.x_v));
  if (!(x > d.folds.x_i && x <= d.folds.x_v + slack)) {
    std::ostringstream os;
    os << "x=" << x << " outside (x_i, x_v] = (" << d.folds.x_i << ", " << d.folds.x_v << "]";
    throw Error(ErrorCode::NotInRange, os.str());
  }
}

}  // namespace

AnnulusData analyze_annulus(const SmoothField& f_minus, double x_lo, double x_hi, const Tolerances& tol) {
  AnnulusData d;
  d.f_minus = f_minus;
  d.tol = tol;
  d.folds = find_folds(f_minus, x_lo, x_hi, tol);
  d.p_i = Vec2(d.folds.x_i, 0.0);
  d.p_v = Vec2(d.folds.x_v, 0.0);
  auto cyc = std::make_shared<AnnulusOrbit>(build_orbit(f_minus, d.folds.x_v, tol));
  d.sigma_v = cyc->sigma_bar;
  d.q_v = cyc->landing;
  d.F2_qv = cyc->landing_speed;
  d.cycle = cyc;

  // Supremum of sigma_bar by sampling, then a local refinement if interior.
  const int n = 512;
  const double w = d.folds.x_v - d.folds.x_i;
  double best = d.sigma_v, best_x = d.folds.x_v;
  int best_k = n;
  for (int k = 1; k < n; ++k) {
    const double x = d.folds.x_i + w * k / n;
    const double s = hit_switching(f_minus, 0.0, Vec2(x, 0.0), Direction::Forward, tol).elapsed;
    if (s > best) {
      best = s;
      best_x = x;
      best_k = k;
    }
  }
  if (best_k < n) {
    auto neg = [&](double x) { return -hit_switching(f_minus, 0.0, Vec2(x, 0.0), Direction::Forward, tol).elapsed; };
    const double a = d.folds.x_i + w * (best_k - 1) / n;
    const double b = d.folds.x_i + w * (best_k + 1) / n;
    const auto r = boost::math::tools::brent_find_minima(neg, a, b, 40);
    if (-r.second > best) {
      best = -r.second;
      best_x = r.first;
    }
  }
  d.sigma_M = best;
  d.x_at_sigma_M = best_x;
  return d;
}

double half_return_time(const AnnulusData& data, double x) {
  check_domain(data, x);
  return hit_switching(data.f_minus, 0.0, Vec2(x, 0.0), Direction::Forward, data.tol).elapsed;
}

AnnulusOrbit annulus_orbit(const AnnulusData& data, double x) {
  check_domain(data, x);
  if (data.cycle && x == data.cycle->x) return *data.cycle;
  return build_orbit(data.f_minus, x, data.tol);
}

double sigma_prime(const AnnulusData& data, double x) {
  const AnnulusOrbit o = annulus_orbit(data, x);
  const Mat2 y = o.Y(o.sigma_bar);
  return -y(1, 0) / o.landing_speed;
}

std::vector<SigmaRoot> invert_sigma(const AnnulusData& data, double sigma, int grid) {
  const double xv = data.folds.x_v, xi = data.folds.x_i;
  if (!(sigma > 0.0) || sigma > data.sigma_M * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "sigma=" << sigma << " outside (0, " << data.sigma_M << "]";
    throw Error(ErrorCode::NotInRange, os.str());
  }
  auto g = [&](double x) { return half_return_time(data, x) - sigma; };
  auto dg = [&](double x) { return sigma_prime(data, x); };
  std::vector<SigmaRoot> roots;
  const double w = xv - xi;
  double xa = xi + w / grid;
  double ga = g(xa);
  for (int k = 2; k <= grid; ++k) {
    const double xb = xi + w * k / grid;
    const double gb = k == grid ? data.sigma_v - sigma : g(xb);
    if (ga != 0.0 && ga * gb < 0.0) {
      roots.push_back({bracketed_newton(g, dg, xa, xb, 1e-13 * std::max(1.0, sigma)), 0.0});
    } else if (k == grid && std::abs(gb) <= 1e-12 * std::max(1.0, sigma)) {
      roots.push_back({xv, 0.0});
    } else if (ga == 0.0) {
      roots.push_back({xa, 0.0});
    }
    xa = xb;
    ga = gb;
  }
  if (roots.empty()) {
    std::ostringstream os;
    os << "no x in (x_i, x_v] with sigma_bar(x)=" << sigma;
    throw Error(ErrorCode::NotInRange, os.str());
  }
  for (auto& r : roots) {
    r.slope = dg(r.x);
    if (std::abs(r.slope) <= data.tol.slope) {
      std::ostringstream os;
      os << "sigma_bar'(" << r.x << ") = " << r.slope;
      throw Error(ErrorCode::DegenerateSlope, os.str());
    }
  }
  return roots;
}

}  // namespace twofold
