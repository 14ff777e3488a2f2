#include "twofold/verify.hpp"

#include "twofold/error.hpp"
#include "twofold/melnikov.hpp"
#include "twofold/quadrature.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <sstream>

namespace twofold {

namespace {

double wrap_phase(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d <= -0.5 * period) d += period;
  return d;
}

}  // namespace

Vec2 stroboscopic_map(const FilippovModel& model, double theta0, const Vec2& z0, const Tolerances& tol) {
  return flow_filippov(model, theta0, z0, model.period(), tol).z_end;
}

FixedPointResult find_fixed_point(const FilippovModel& model, double theta_seed, double x_seed, const Tolerances& tol,
                                  const FixedPointOptions& opt) {
  const SmoothField fm = model.side_field(Side::Minus);
  const Vec2 start(x_seed, 0.0);
  const HitResult arc = hit_switching(fm, theta_seed, start, Direction::Forward, tol);
  const double delta = 0.5 * arc.elapsed;
  const double ts = theta_seed + delta;
  Vec2 z = flow_smooth(fm, theta_seed, start, delta, tol).back();

  auto residual = [&](const Vec2& p) { return Vec2(stroboscopic_map(model, ts, p, tol) - p); };
  Vec2 r = residual(z);
  double res = r.norm();
  double h = std::max(1e-6, 1e-3 * model.epsilon);
  int it = 0;
  bool retried = false;
  while (res > opt.tol_fp) {
    if (++it > opt.max_iter) break;
    Mat2 j;
    for (int c = 0; c < 2; ++c) {
      Vec2 zp = z;
      zp[c] += h;
      j.col(c) = (residual(zp) - r) / h;
    }
    const double det = j.determinant();
    if (!std::isfinite(det) || det == 0.0) {
      throw Error(ErrorCode::NewtonDiverged, "singular Jacobian of the period map");
    }
    const Vec2 dz = -adjugate_inverse(j, det) * r;
    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 8; ++k, lambda *= 0.5) {
      const Vec2 zn = z + lambda * dz;
      const Vec2 rn = residual(zn);
      if (rn.norm() < res) {
        z = zn;
        r = rn;
        res = rn.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stagnation: the difference step may straddle an event change.
      if (retried) break;
      retried = true;
      h *= 0.1;
    }
  }
  if (!(res <= opt.tol_fp)) {
    std::ostringstream os;
    os << "period-map residual " << res << " after " << it << " iterations";
    throw Error(ErrorCode::NewtonDiverged, os.str());
  }

  FixedPointResult out;
  out.epsilon = model.epsilon;
  out.section_time = ts;
  out.section_point = z;
  out.residual = res;
  out.iterations = it;
  const HitResult back = hit_switching(fm, ts, z, Direction::Backward, tol);
  out.theta_fix = model.reduce(back.t);
  out.z_fix = back.point;
  out.distance = std::hypot(wrap_phase(out.theta_fix - theta_seed, model.period()), out.z_fix.x() - x_seed);
  return out;
}

Displacement displacement_annulus(const FilippovModel& model, double theta, double x, double eps,
                                  const Tolerances& tol) {
  const FilippovModel m = model.with_epsilon(eps);
  const Vec2 z(x, 0.0);
  const HitResult lo = hit_switching(m.side_field(Side::Minus), theta, z, Direction::Forward, tol);
  const HitResult up = hit_switching(m.side_field(Side::Plus), theta + m.period(), z, Direction::Backward, tol);
  Displacement d;
  d.t_minus = lo.elapsed;
  d.t_plus = up.elapsed;
  d.x_minus = lo.point.x();
  d.x_plus = up.point.x();
  d.F1 = d.t_minus - d.t_plus - m.period();
  d.F2 = d.x_minus - d.x_plus;
  return d;
}

SlidingCycleReport verify_sliding_cycle(const FilippovModel& model, const AnnulusData& data, double theta0,
                                        double eps, const Tolerances& tol) {
  SlidingCycleReport rep;
  const double gp = model.g_plus(theta0, data.p_v).y();
  const double gm = model.g_minus(theta0, data.p_v).y();
  rep.time_reversed = gp > gm;
  FilippovModel m = rep.time_reversed ? model.time_reversed() : model;
  m.epsilon = eps;
  const double per = m.period();
  rep.theta0 = rep.time_reversed ? m.reduce(-theta0) : theta0;
  rep.x0 = perturbed_fold(m, Side::Minus, rep.theta0, data.folds.x_v);

  HybridOptions ho;
  ho.stop_on = {EventKind::ExitSlidingAtFold};
  rep.trajectory = flow_filippov(m, rep.theta0, Vec2(rep.x0, 0.0), 1.5 * per, tol, ho);
  const HybridTrajectory& tr = rep.trajectory;
  rep.has_sliding = tr.has_sliding();
  if (!rep.has_sliding) {
    std::ostringstream os;
    os << "no sliding segment within 1.5 periods from theta0=" << rep.theta0;
    throw Error(ErrorCode::NoSlidingSegment, os.str());
  }
  rep.sliding_time = tr.sliding_time();
  rep.sliding_region_ok = true;
  for (const auto& seg : tr.segments) {
    if (seg.mode != Mode::Sliding) continue;
    for (const auto& st : seg.dense.steps()) {
      const RegionKind k = classify_point(m, st.t0, st.r1[0], tol);
      if (k == RegionKind::Escaping) rep.sliding_region_ok = false;
    }
  }
  if (!tr.stopped) {
    throw Error(ErrorCode::NoSlidingSegment, "sliding segment did not end at a fold within 1.5 periods");
  }
  const HybridEvent& ev = tr.events.back();
  rep.theta_exit = ev.t;
  rep.x_exit = ev.x;
  rep.exit_to = ev.to;
  rep.phase_mismatch = ev.t - rep.theta0 - per;
  rep.x_mismatch = ev.x - rep.x0;
  rep.closure = std::hypot(rep.phase_mismatch, rep.x_mismatch);
  rep.tau_eps = eps > 0.0 ? -rep.sliding_time / eps : 0.0;
  try {
    rep.tau_star = tau_star(slowfast_quantities(m, data, rep.theta0));
  } catch (const Error&) {
    rep.tau_star.reset();
  }
  return rep;
}

SlidingCycle locate_sliding_cycle(const FilippovModel& model, const AnnulusData& data, double theta_star,
                                  double eps, const Tolerances& tol, const SlidingCycleSearch& opt) {
  SlidingCycle out;
  out.theta_star = theta_star;
  const double sgn = model.g_plus(theta_star, data.p_v).y() > model.g_minus(theta_star, data.p_v).y() ? -1.0 : 1.0;
  // Runs are parametrized by the phase in the original model; the reversed
  // model maps theta to -theta, so the scan direction is flipped there.
  auto run = [&](double th) -> std::optional<SlidingCycleReport> {
    try {
      SlidingCycleReport r = verify_sliding_cycle(model, data, th, eps, tol);
      if (r.exit_to != Mode::Below) return std::nullopt;
      return r;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoSlidingSegment || e.code() == ErrorCode::GrazingHit) return std::nullopt;
      throw;
    }
  };

  const int n = static_cast<int>(std::ceil(opt.half_width / opt.step));
  std::optional<std::pair<double, double>> bracket;
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::pair<double, SlidingCycleReport>> prev;
  for (int k = -n; k <= n; ++k) {
    const double th = theta_star + sgn * k * opt.step * eps;
    const auto r = run(th);
    if (!r) {
      prev.reset();
      continue;
    }
    ++out.sliding_samples;
    if (prev && (prev->second.phase_mismatch > 0.0) != (r->phase_mismatch > 0.0)) {
      const double mid = 0.5 * (prev->first + th);
      if (std::abs(mid - theta_star) < best) {
        best = std::abs(mid - theta_star);
        bracket = std::make_pair(prev->first, th);
      }
    }
    prev = std::make_pair(th, *r);
  }
  if (!bracket) {
    std::ostringstream os;
    os << "no closing sliding cycle within theta*+-" << opt.half_width * eps << " (" << out.sliding_samples
       << " sliding runs)";
    throw Error(ErrorCode::NoSlidingSegment, os.str());
  }

  // Bisection keeps every probe inside the sliding window.
  double a = bracket->first, b = bracket->second;
  SlidingCycleReport ra = *run(a);
  SlidingCycleReport best_rep = ra;
  while (std::abs(b - a) > opt.tol_theta) {
    const double c = 0.5 * (a + b);
    const auto rc = run(c);
    if (!rc) break;
    if ((rc->phase_mismatch > 0.0) == (ra.phase_mismatch > 0.0)) {
      a = c;
      ra = *rc;
    } else {
      b = c;
    }
    best_rep = *rc;
  }
  out.theta_eps = 0.5 * (a + b);
  out.report = best_rep;
  out.x_eps = best_rep.x0;
  out.closure = best_rep.closure;
  // The limit value belongs to the unperturbed zero, not to the shifted cycle.
  try {
    out.report.tau_star = classify_twofold(model, data, theta_star).tau_star;
  } catch (const Error&) {
    out.report.tau_star.reset();
  }
  const double dth = wrap_phase(out.theta_eps - theta_star, model.period());
  out.offset = std::hypot(dth, out.x_eps - data.folds.x_v);
  return out;
}

FirstVariationReport first_variation(const FilippovModel& model, Side side, double theta0, const Vec2& z0,
                                     const Vec2& z1, double t, const std::vector<double>& epsilons,
                                     const Tolerances& tol) {
  const SmoothField& f = model.f(side);
  const SmoothField& g = model.g(side);
  const VariationalSolution var = flow_variational(f, 0.0, z0, t, tol);
  std::vector<double> breaks;
  for (const auto& s : var.dense.steps()) breaks.push_back(s.t0);
  breaks.push_back(t);
  if (breaks.size() < 2) breaks.insert(breaks.begin(), 0.0);
  const QuadResult q = integrate_gk15(
      [&](double s) -> Vec2 {
        const Mat2 y = var.fundamental(s);
        return adjugate_inverse(y, y.determinant()) * g(s + theta0, var.state(s));
      },
      breaks, 1e-12);
  FirstVariationReport rep;
  rep.psi = var.fundamental(t) * (z1 + q.value);
  const Vec2 base = var.state(t);
  for (double eps : epsilons) {
    const FilippovModel m = model.with_epsilon(eps);
    const Vec2 xi = flow_smooth(m.side_field(side), theta0, Vec2(z0 + eps * z1), t, tol).back();
    rep.epsilons.push_back(eps);
    rep.errors.push_back((xi - base - eps * rep.psi).norm());
  }
  rep.order = fitted_order(rep.epsilons, rep.errors);
  return rep;
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace twofold
