#pragma once

// Dormand-Prince 5(4) with the standard fourth-order continuous extension and
// switching-function location on the dense interpolant.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace twofold::ode {

struct Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 selects an automatic first step
  double h_max = 0.05;
  double h_min = 1e-14;  // relative to max(1, |t|)
  std::size_t max_steps = 5'000'000;
  double bound = 1e6;  // |z_i| limit on the first `bounded` components
  int bounded = 2;
  double event_tol = 1e-12;
};

enum class Status { Completed, Event, StepSizeUnderflow, DomainEscape, MaxSteps };

template <int N>
using State = Eigen::Matrix<double, N, 1>;

/// One accepted step together with its interpolation coefficients.
template <int N>
struct Step {
  double t0 = 0.0;
  double h = 0.0;
  State<N> r1, r2, r3, r4, r5;

  State<N> eval(double theta) const {
    const double s = 1.0 - theta;
    return r1 + theta * (r2 + s * (r3 + theta * (r4 + s * r5)));
  }

  /// d/dt of the interpolant at t0 + theta*h.
  State<N> derivative(double theta) const {
    const double s = 1.0 - theta;
    const State<N> q = r4 + s * r5;
    const State<N> dq = -r5;
    const State<N> r = r3 + theta * q;
    const State<N> dr = q + theta * dq;
    const State<N> u = r2 + s * r;
    const State<N> du = -r + s * dr;
    return (u + theta * du) / h;
  }

  double t1() const { return t0 + h; }
};

/// Piecewise-polynomial dense output over a run of accepted steps. Steps may
/// run backward in time (h < 0).
template <int N>
class Dense {
 public:
  Dense() = default;
  Dense(double t0, const State<N>& y0) : t_begin_(t0), t_end_(t0), y_begin_(y0), y_end_(y0) {}

  void append(const Step<N>& step, const State<N>& y_end) {
    steps_.push_back(step);
    t_end_ = step.t1();
    y_end_ = y_end;
  }

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  const State<N>& front() const { return y_begin_; }
  const State<N>& back() const { return y_end_; }
  const std::vector<Step<N>>& steps() const { return steps_; }
  bool forward() const { return t_end_ >= t_begin_; }

  State<N> operator()(double t) const {
    if (steps_.empty() || t == t_begin_) return y_begin_;
    if (t == t_end_) return y_end_;
    const Step<N>& s = locate(t);
    return s.eval((t - s.t0) / s.h);
  }

  State<N> derivative(double t) const {
    const Step<N>& s = locate(t);
    return s.derivative((t - s.t0) / s.h);
  }

 private:
  const Step<N>& locate(double t) const {
    // First step whose end lies at or beyond t in the direction of travel.
    const bool fwd = forward();
    auto it = std::lower_bound(steps_.begin(), steps_.end(), t, [fwd](const Step<N>& s, double v) {
      return fwd ? s.t1() < v : s.t1() > v;
    });
    if (it == steps_.end()) --it;
    return *it;
  }

  double t_begin_ = 0.0;
  double t_end_ = 0.0;
  State<N> y_begin_ = State<N>::Zero();
  State<N> y_end_ = State<N>::Zero();
  std::vector<Step<N>> steps_;
};

/// Scalar switching function; an event fires where it passes from > 0 to <= 0.
/// With skip_initial_zero the start value may be 0 (trajectory leaving the
/// surface); the function must become positive before a crossing counts.
template <int N>
struct EventFunction {
  std::function<double(double, const State<N>&)> g;
  bool skip_initial_zero = false;
};

template <int N>
struct Result {
  Dense<N> dense;
  Status status = Status::Completed;
  double t = 0.0;
  State<N> y = State<N>::Zero();
  int event = -1;  // index of the event function that terminated the run
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

template <int N>
using Rhs = std::function<State<N>(double, const State<N>&)>;

namespace detail {

template <int N>
struct StageData {
  State<N> y1;
  State<N> err;
  std::array<State<N>, 7> k;
};

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <int N>
StageData<N> dp_step(const Rhs<N>& f, double t, const State<N>& y, const State<N>& k1, double h) {
  StageData<N> s;
  auto& k = s.k;
  k[0] = k1;
  k[1] = f(t + c2 * h, y + h * (a21 * k[0]));
  k[2] = f(t + c3 * h, y + h * (a31 * k[0] + a32 * k[1]));
  k[3] = f(t + c4 * h, y + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]));
  k[4] = f(t + c5 * h, y + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]));
  k[5] = f(t + h, y + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]));
  s.y1 = y + h * (a71 * k[0] + a73 * k[2] + a74 * k[3] + a75 * k[4] + a76 * k[5]);
  k[6] = f(t + h, s.y1);
  s.err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
  return s;
}

template <int N>
Step<N> make_step(double t, const State<N>& y, double h, const StageData<N>& s) {
  Step<N> st;
  st.t0 = t;
  st.h = h;
  st.r1 = y;
  st.r2 = s.y1 - y;
  st.r3 = h * s.k[0] - st.r2;
  st.r4 = st.r2 - h * s.k[6] - st.r3;
  st.r5 = h * (d1 * s.k[0] + d3 * s.k[2] + d4 * s.k[3] + d5 * s.k[4] + d6 * s.k[5] + d7 * s.k[6]);
  return st;
}

template <int N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1, const Options& o) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

template <int N>
bool out_of_bounds(const State<N>& y, const Options& o) {
  const int m = std::min<int>(o.bounded, static_cast<int>(y.size()));
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(y[i]) || std::abs(y[i]) > o.bound) return true;
  }
  return false;
}

// Root of phi on [a, b] (phi(a) > 0 >= phi(b)) by bisection-safeguarded
// Newton with a finite-difference slope.
template <class Phi>
double refine_root(const Phi& phi, double a, double b, double tol) {
  double fa = phi(a);
  double fb = phi(b);
  if (fb == 0.0) return b;
  double x = b - fb * (b - a) / (fb - fa);
  if (!(x > a && x < b)) x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = phi(x);
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon()) return b;
    const double d = 1e-7 * (b - a);
    const double slope = (phi(x + d) - phi(x - d)) / (2.0 * d);
    double xn = (slope != 0.0) ? x - fx / slope : 0.5 * (a + b);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    x = xn;
  }
  return b;
}

// Minimiser of a function on [a, b] given a derivative sign change (- to +).
template <class DPhi>
double locate_minimum(const DPhi& dphi, double a, double b) {
  for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
    const double m = 0.5 * (a + b);
    if (dphi(m) < 0.0) a = m;
    else b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Integrate y' = f(t, y) from t0 toward t1 (either direction), stopping at the
/// first event if any event functions are given.
template <int N>
Result<N> integrate(const Rhs<N>& f, double t0, const State<N>& y0, double t1, const Options& opt,
                    std::span<const EventFunction<N>> events = {}) {
  Result<N> res;
  res.dense = Dense<N>(t0, y0);
  res.t = t0;
  res.y = y0;
  const double span = t1 - t0;
  if (span == 0.0) return res;
  const double dir = span > 0.0 ? 1.0 : -1.0;

  constexpr int kSamples = 8;
  std::vector<char> armed(events.size(), 1);
  for (std::size_t e = 0; e < events.size(); ++e) {
    const double g0 = events[e].g(t0, y0);
    armed[e] = g0 > 0.0 ? 1 : 0;
    if (!events[e].skip_initial_zero && g0 <= 0.0) {
      res.status = Status::Event;
      res.event = static_cast<int>(e);
      return res;
    }
  }

  double t = t0;
  State<N> y = y0;
  State<N> k1 = f(t, y);
  double h;
  if (opt.h_init > 0.0) {
    h = opt.h_init;
  } else {
    const double d0 = y.norm();
    const double d1 = k1.norm();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-4 : 0.01 * d0 / d1;
    h = std::max(h, 1e-6);
  }
  h = std::min({h, opt.h_max, std::abs(span)}) * dir;

  bool last_rejected = false;
  while (true) {
    if (res.steps + res.rejected >= opt.max_steps) {
      res.status = Status::MaxSteps;
      break;
    }
    const double remaining = t1 - t;
    if (std::abs(remaining) < opt.h_min * std::max(1.0, std::abs(t))) {
      // Roundoff sliver left after an event near t1: close it with one Euler step.
      res.t = t1;
      res.y = y + remaining * k1;
      res.status = Status::Completed;
      return res;
    }
    if (std::abs(h) >= std::abs(remaining)) h = remaining;
    if (std::abs(h) < opt.h_min * std::max(1.0, std::abs(t))) {
      res.status = Status::StepSizeUnderflow;
      break;
    }
    detail::StageData<N> s = detail::dp_step<N>(f, t, y, k1, h);
    const double err = detail::error_norm<N>(s.err, y, s.y1, opt);
    if (!std::isfinite(err) || err > 1.0) {
      ++res.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
      continue;
    }
    ++res.steps;
    const Step<N> step = detail::make_step<N>(t, y, h, s);

    // Event scan on the interpolant of this step.
    int best = -1;
    double best_theta = 2.0;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const auto& g = events[e].g;
      auto phi = [&](double th) { return g(t + th * h, step.eval(th)); };
      auto dphi = [&](double th) {
        const double d = 1e-6;
        const double lo = std::max(0.0, th - d), hi = std::min(1.0, th + d);
        return (phi(hi) - phi(lo)) / (hi - lo);
      };
      std::array<double, kSamples + 1> th{}, gv{};
      for (int j = 0; j <= kSamples; ++j) {
        th[j] = static_cast<double>(j) / kSamples;
        gv[j] = (j == kSamples) ? g(t + h, s.y1) : (j == 0 ? g(t, y) : phi(th[j]));
      }
      double lo = -1.0, hi = -1.0;
      bool was_armed = armed[e] != 0;
      for (int j = 1; j <= kSamples && lo < 0.0; ++j) {
        const double gp = (j == 1 && !was_armed) ? 0.0 : gv[j - 1];
        if (was_armed && gp > 0.0 && gv[j] <= 0.0) {
          lo = th[j - 1];
          hi = th[j];
          break;
        }
        if (was_armed && gp > 0.0 && gv[j] > 0.0) {
          const double da = dphi(th[j - 1]);
          const double db = dphi(th[j]);
          if (da < 0.0 && db > 0.0) {
            const double tm = detail::locate_minimum(dphi, th[j - 1], th[j]);
            if (phi(tm) <= 0.0) {
              lo = th[j - 1];
              hi = tm;
              break;
            }
          }
        }
        if (gv[j] > 0.0) was_armed = true;
      }
      if (lo < 0.0) {
        if (was_armed) armed[e] = 1;
        else if (gv[kSamples] < 0.0 && res.steps == 1) {
          // Left the surface on the wrong side: report an immediate event.
          lo = 0.0;
          hi = 0.0;
        }
      }
      if (lo < 0.0) continue;
      double root = hi;
      if (hi > lo) root = detail::refine_root(phi, lo, hi, opt.event_tol);
      if (root < best_theta) {
        best_theta = root;
        best = static_cast<int>(e);
      }
    }

    if (best >= 0) {
      // Polish the event on genuine Runge-Kutta steps from the step start.
      const auto& g = events[best].g;
      double he = best_theta * h;
      if (he == 0.0) {
        res.status = Status::Event;
        res.event = best;
        res.t = t;
        res.y = y;
        return res;
      }
      detail::StageData<N> se = detail::dp_step<N>(f, t, y, k1, he);
      for (int it = 0; it < 4; ++it) {
        const double ge = g(t + he, se.y1);
        if (std::abs(ge) <= opt.event_tol) break;
        const double d = 1e-7 * std::abs(h);
        const double gp = g(t + he + d * dir, step.eval((he + d * dir) / h));
        const double gm = g(t + he - d * dir, step.eval((he - d * dir) / h));
        const double dg = (gp - gm) / (2.0 * d * dir);
        if (dg == 0.0 || !std::isfinite(dg)) break;
        const double hn = he - ge / dg;
        if (hn * dir <= 0.0 || std::abs(hn) > std::abs(h)) break;
        he = hn;
        se = detail::dp_step<N>(f, t, y, k1, he);
      }
      const Step<N> last = detail::make_step<N>(t, y, he, se);
      res.dense.append(last, se.y1);
      res.status = Status::Event;
      res.event = best;
      res.t = t + he;
      res.y = se.y1;
      return res;
    }

    res.dense.append(step, s.y1);
    t = t + h;
    y = s.y1;
    k1 = s.k[6];
    res.t = t;
    res.y = y;
    if (detail::out_of_bounds<N>(y, opt)) {
      res.status = Status::DomainEscape;
      return res;
    }
    if (t == t1) {
      res.status = Status::Completed;
      return res;
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
    last_rejected = false;
    h = dir * std::min(std::abs(h) * fac, opt.h_max);
  }
  return res;
}

}  // namespace twofold::ode
