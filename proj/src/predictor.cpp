#include "twofold/predictor.hpp"

#include "twofold/error.hpp"
#include "twofold/lambert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twofold {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::CrossingAnnulus: return "crossing";
    case Classification::CrossingTwoFold: return "crossing-twofold";
    case Classification::SlidingOnSigmaS: return "sliding-sigma-s";
    case Classification::SlidingOnSigmaE: return "sliding-sigma-e";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct Sample {
  double x;
  double f;
};

double refine(const std::function<double(double)>& f, double a, double fa, double b, double fb, double h,
              double tol_zero) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double x = a - fa * (b - a) / (fb - fa);
  for (int it = 0; it < 80; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= tol_zero) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    const double d = (f(x + h) - f(x - h)) / (2.0 * h);
    double xn = d != 0.0 ? x - fx / d : 0.5 * (a + b);
    if (!(xn > std::min(a, b) && xn < std::max(a, b))) xn = 0.5 * (a + b);
    if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

std::vector<MelnikovZero> zeros_from_samples(const std::function<double(double)>& f, const std::vector<Sample>& s,
                                             double h, double merge, const ZeroOptions& opt) {
  std::vector<MelnikovZero> out;
  double fmax = 0.0;
  for (const auto& p : s) fmax = std::max(fmax, std::abs(p.f));
  if (fmax <= opt.tol_zero) {
    throw Error(ErrorCode::NoZeros, "the function vanishes identically on the sample grid (degenerate)");
  }
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const Sample& a = s[k];
    const Sample& b = s[k + 1];
    if (a.f == 0.0 && k > 0) continue;  // counted as the right end of the previous interval
    if (a.f * b.f > 0.0) continue;
    if (a.f == 0.0 && b.f == 0.0) continue;
    const double z = refine(f, a.x, a.f, b.x, b.f, h, opt.tol_zero);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const MelnikovZero& m) { return std::abs(m.theta - z) <= merge; });
    if (dup) continue;
    const double slope = (f(z + h) - f(z - h)) / (2.0 * h);
    if (std::abs(slope) <= opt.tol_slope) {
      std::ostringstream os;
      os << "zero at " << z << " has slope " << slope;
      throw Error(ErrorCode::NonSimpleZero, os.str());
    }
    out.push_back({z, slope});
  }
  // A sample that touches zero without a sign change is a double zero.
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (std::abs(s[k].f) > opt.tol_zero || s[k - 1].f * s[k + 1].f <= 0.0) continue;
    if (std::abs(s[k].f) > std::min(std::abs(s[k - 1].f), std::abs(s[k + 1].f))) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const MelnikovZero& m) { return std::abs(m.theta - s[k].x) <= merge; });
    if (seen) continue;
    std::ostringstream os;
    os << "zero at " << s[k].x << " without a sign change";
    throw Error(ErrorCode::NonSimpleZero, os.str());
  }
  if (out.empty()) throw Error(ErrorCode::NoZeros, "no sign change on the sample grid");
  std::sort(out.begin(), out.end(), [](const MelnikovZero& a, const MelnikovZero& b) { return a.theta < b.theta; });
  return out;
}

}  // namespace

std::vector<MelnikovZero> find_melnikov_zeros(const std::function<double(double)>& m, double period,
                                              const ZeroOptions& opt) {
  const int n = std::max(opt.nodes, 64);
  const double h = opt.fd_step > 0.0 ? opt.fd_step : 1e-6 * period / 2.0;
  std::vector<Sample> s;
  s.reserve(n + 1);
  for (int k = 0; k < n; ++k) {
    const double th = period * k / n;
    s.push_back({th, m(th)});
  }
  s.push_back({period, s.front().f});
  auto zs = zeros_from_samples(m, s, h, 1e-8 * period, opt);
  // Fold zeros back into [0, period) and drop the wrap-around duplicate.
  for (auto& z : zs) {
    z.theta = std::fmod(z.theta, period);
    if (z.theta < 0.0) z.theta += period;
    if (period - z.theta <= 1e-8 * period) z.theta = 0.0;
  }
  std::sort(zs.begin(), zs.end(), [](const MelnikovZero& a, const MelnikovZero& b) { return a.theta < b.theta; });
  zs.erase(std::unique(zs.begin(), zs.end(),
                       [&](const MelnikovZero& a, const MelnikovZero& b) { return std::abs(a.theta - b.theta) <= 1e-8 * period; }),
           zs.end());
  return zs;
}

std::vector<MelnikovZero> find_zeros_on_interval(const std::function<double(double)>& f, double a, double b,
                                                 const ZeroOptions& opt) {
  const int n = std::max(opt.nodes, 2);
  const double h = opt.fd_step > 0.0 ? opt.fd_step : 1e-6 * (b - a);
  std::vector<Sample> s;
  for (int k = 0; k <= n; ++k) {
    const double x = a + (b - a) * k / n;
    s.push_back({x, f(x)});
  }
  return zeros_from_samples(f, s, h, 1e-8 * (b - a), opt);
}

double SlowFast::k(double tau) const { return m1 + (F1_pv / p) * std::exp(tau * p); }

SlowFast slowfast_quantities(const FilippovModel& model, const AnnulusData& data, double theta) {
  const double gp = model.g_plus(theta, data.p_v).y();
  const double gm = model.g_minus(theta, data.p_v).y();
  if (std::abs(gp - gm) <= data.tol.tangency) {
    std::ostringstream os;
    os << "G2+(theta, p_v) = G2-(theta, p_v) = " << gp << " at theta=" << theta;
    throw Error(ErrorCode::DivisionDegeneracy, os.str());
  }
  const double slope = data.folds.dF2dx_v;
  const double f1 = data.folds.F1_v;
  SlowFast sf;
  sf.F1_pv = f1;
  sf.p = 2.0 * f1 * slope / (gp - gm);
  sf.m1 = -(gp + gm) / (2.0 * slope);
  sf.nu_v_minus = fold_shift(model, data, theta).nu_v_minus;
  sf.A = (sf.m1 + sf.nu_v_minus) / f1 + g_theta(model, data, theta).value / data.F2_qv;
  sf.repelling = sf.p > 0.0;
  return sf;
}

double tau_star(const SlowFast& sf) {
  const double ap = sf.A * sf.p;
  if (!(sf.p > 0.0) || ap <= -1.0) {
    std::ostringstream os;
    os << "A p = " << ap << ", p = " << sf.p << ": no negative closure time";
    throw Error(ErrorCode::PositiveTau, os.str());
  }
  return -sf.A - lambert_w0(std::exp(-ap)) / sf.p;
}

TwoFoldResult classify_twofold(const FilippovModel& model, const AnnulusData& data, double theta_star) {
  TwoFoldResult r;
  r.g = g_theta(model, data, theta_star).value;
  r.threshold = twofold_threshold(model, data, theta_star);
  r.G2_plus = model.g_plus(theta_star, data.p_v).y();
  r.G2_minus = model.g_minus(theta_star, data.p_v).y();
  const double margin = 1e-8 * (std::abs(r.g) + std::abs(r.threshold) + 1.0);
  if (std::abs(r.g - r.threshold) <= margin) {
    std::ostringstream os;
    os << "g = " << r.g << " equals the threshold " << r.threshold << " within " << margin;
    throw Error(ErrorCode::Inconclusive, os.str());
  }
  if (r.g < r.threshold) {
    r.kind = Classification::CrossingTwoFold;
    r.chi_star = -data.folds.F1_v * r.g / (2.0 * data.F2_qv);
    return r;
  }
  if (std::abs(r.G2_plus - r.G2_minus) <= margin) {
    throw Error(ErrorCode::Inconclusive, "G2+ = G2- at theta*: no sliding strip");
  }
  if (r.G2_plus < r.G2_minus) {
    r.kind = Classification::SlidingOnSigmaS;
    r.slowfast = slowfast_quantities(model, data, theta_star);
  } else {
    // Escaping strip: work on z~(t) = R z(-t), where it becomes a sliding strip.
    r.kind = Classification::SlidingOnSigmaE;
    r.time_reversed = true;
    const double per = model.period();
    r.reversed_theta = std::fmod(per - std::fmod(theta_star, per), per);
    r.slowfast = slowfast_quantities(model.time_reversed(), data, r.reversed_theta);
  }
  r.tau_star = tau_star(*r.slowfast);
  return r;
}

PredictionReport predict_annulus(const FilippovModel& model, const AnnulusData& data, double sigma,
                                 const ZeroOptions& opt) {
  PredictionReport rep;
  rep.sigma = sigma;
  const auto roots = invert_sigma(data, sigma);
  rep.x_star = roots.front().x;
  if (roots.size() > 1) rep.notes.push_back(std::to_string(roots.size()) + " solutions of sigma_bar(x) = sigma");
  const FilippovModel m = [&] {
    FilippovModel c = model;
    c.sigma = sigma;
    return c;
  }();
  for (const auto& root : roots) {
    const AnnulusOrbit o = annulus_orbit(data, root.x);
    std::vector<MelnikovZero> zs;
    try {
      zs = find_melnikov_zeros([&](double th) { return melnikov_M(m, o, th).value; }, m.period(), opt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoZeros) throw;
      rep.notes.push_back(e.what());
      continue;
    }
    for (const auto& z : zs) {
      Prediction p;
      p.theta = z.theta;
      p.x = root.x;
      p.slope = z.slope;
      p.kind = Classification::CrossingAnnulus;
      rep.predictions.push_back(p);
    }
  }
  return rep;
}

PredictionReport predict_twofold(const FilippovModel& model, const AnnulusData& data, const ZeroOptions& opt) {
  if (std::abs(model.sigma - data.sigma_v) > 1e-9 * data.sigma_v) {
    std::ostringstream os;
    os << "model sigma " << model.sigma << " differs from sigma_v " << data.sigma_v;
    throw Error(ErrorCode::NotInRange, os.str());
  }
  PredictionReport rep;
  rep.sigma = model.sigma;
  rep.x_star = data.folds.x_v;
  const AnnulusOrbit& o = *data.cycle;
  std::vector<MelnikovZero> zs;
  try {
    zs = find_melnikov_zeros([&](double th) { return melnikov_M(model, o, th).value; }, model.period(), opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoZeros) throw;
    rep.notes.push_back(e.what());
    return rep;
  }
  for (const auto& z : zs) {
    Prediction p;
    p.theta = z.theta;
    p.x = data.folds.x_v;
    p.slope = z.slope;
    try {
      p.twofold = classify_twofold(model, data, z.theta);
      p.kind = p.twofold->kind;
      if (p.kind == Classification::CrossingTwoFold) p.x = data.folds.x_v + model.epsilon * p.twofold->chi_star;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Inconclusive) throw;
      p.kind = Classification::Inconclusive;
      p.note = e.what();
    }
    rep.predictions.push_back(p);
  }
  return rep;
}

PredictionReport predict_autonomous(const FilippovModel& model, const AnnulusData& data, int nodes,
                                    const ZeroOptions& opt) {
  PredictionReport rep;
  rep.sigma = model.sigma;
  const double xi = data.folds.x_i, xv = data.folds.x_v;
  const double a = xi + (xv - xi) / nodes;
  auto mx = [&](double x) { return melnikov_M(model, data, 0.0, std::clamp(x, a, xv)).value; };
  ZeroOptions o = opt;
  o.nodes = nodes - 1;
  o.fd_step = opt.fd_step > 0.0 ? opt.fd_step : 1e-6 * (xv - xi);
  std::vector<MelnikovZero> zs;
  try {
    zs = find_zeros_on_interval(mx, a, xv, o);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoZeros) throw;
    rep.notes.push_back(e.what());
    return rep;
  }
  for (const auto& z : zs) {
    Prediction p;
    p.theta = 0.0;
    p.x = z.theta;
    p.slope = z.slope;
    p.kind = Classification::CrossingAnnulus;
    p.note = "autonomous perturbation; slope is dM/dx";
    rep.predictions.push_back(p);
  }
  if (!zs.empty()) rep.x_star = zs.front().theta;
  return rep;
}

}  // namespace twofold
