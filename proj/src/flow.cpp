#include "twofold/flow.hpp"

#include "twofold/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace twofold {

namespace {

template <int N>
void throw_on_status(const ode::Result<N>& r, const char* where) {
  std::ostringstream os;
  os << where << " at t=" << r.t;
  switch (r.status) {
    case ode::Status::StepSizeUnderflow: throw Error(ErrorCode::StepSizeUnderflow, os.str());
    case ode::Status::MaxSteps: throw Error(ErrorCode::StepSizeUnderflow, os.str() + " (step budget exhausted)");
    case ode::Status::DomainEscape: throw Error(ErrorCode::DomainEscape, os.str());
    default: break;
  }
}

ode::Rhs<2> rhs2(const SmoothField& f) {
  return [&f](double t, const ode::State<2>& z) -> ode::State<2> { return f(t, z); };
}

ode::Rhs<6> rhs6(const SmoothField& f) {
  return [&f](double t, const ode::State<6>& s) -> ode::State<6> {
    const Vec2 z = s.head<2>();
    const Mat2 a = f.jacobian(t, z);
    const Eigen::Map<const Mat2> y(s.data() + 2);
    ode::State<6> out;
    out.head<2>() = f(t, z);
    Eigen::Map<Mat2>(out.data() + 2) = a * y;
    return out;
  };
}

ode::State<6> pack(const Vec2& z) {
  ode::State<6> s;
  s << z.x(), z.y(), 1.0, 0.0, 0.0, 1.0;
  return s;
}

// Side of the line the smooth flow enters when leaving (t0, z0).
double departure_sign(const SmoothField& f, double t0, const Vec2& z0, double d, const Tolerances& tol) {
  if (std::abs(z0.y()) > tol.event) return z0.y() > 0.0 ? 1.0 : -1.0;
  const Vec2 v = f(t0, z0);
  if (std::abs(v.y()) > tol.tangency) return d * v.y() > 0.0 ? 1.0 : -1.0;
  const Mat2 j = f.jacobian(t0, z0);
  const double lie2 = j(1, 0) * v.x() + j(1, 1) * v.y();
  if (std::abs(lie2) <= tol.tangency) {
    throw Error(ErrorCode::DegenerateTangency, "flow starts at a degenerate tangency");
  }
  return lie2 > 0.0 ? 1.0 : -1.0;
}

template <int N>
HitResult finish_hit(const SmoothField& f, double t0, const ode::Result<N>& r, const Tolerances& tol) {
  if (r.status == ode::Status::Completed) {
    throw Error(ErrorCode::NoHitWithinHorizon, "no return to y=0 within " + std::to_string(tol.horizon));
  }
  throw_on_status(r, "hit_switching");
  HitResult h;
  h.t = r.t;
  h.elapsed = r.t - t0;
  h.point = Vec2(r.y[0], 0.0);
  h.normal_speed = f(h.t, h.point).y();
  if (h.elapsed == 0.0) throw Error(ErrorCode::GrazingHit, "flow leaves toward the wrong side of y=0");
  if (std::abs(h.normal_speed) <= tol.tangency) {
    std::ostringstream os;
    os << "tangential hit at x=" << h.point.x() << ", F2=" << h.normal_speed;
    throw Error(ErrorCode::GrazingHit, os.str());
  }
  return h;
}

}  // namespace

DenseSolution flow_smooth(const SmoothField& field, double t0, const Vec2& z0, double duration,
                          const Tolerances& tol) {
  auto r = ode::integrate<2>(rhs2(field), t0, z0, t0 + duration, tol.ode);
  throw_on_status(r, "flow_smooth");
  return std::move(r.dense);
}

Vec2 VariationalSolution::state(double t) const { return dense(t).head<2>(); }

Mat2 VariationalSolution::fundamental(double t) const {
  const ode::State<6> s = dense(t);
  return Eigen::Map<const Mat2>(s.data() + 2);
}

VariationalSolution flow_variational(const SmoothField& field, double t0, const Vec2& z0, double duration,
                                     const Tolerances& tol) {
  auto r = ode::integrate<6>(rhs6(field), t0, pack(z0), t0 + duration, tol.ode);
  throw_on_status(r, "flow_variational");
  return {std::move(r.dense)};
}

HitResult hit_switching(const SmoothField& field, double t0, const Vec2& z0, Direction dir, const Tolerances& tol) {
  const double d = sign_of(dir);
  const double s = departure_sign(field, t0, z0, d, tol);
  const ode::EventFunction<2> ev{[s](double, const ode::State<2>& z) { return s * z[1]; }, true};
  auto r = ode::integrate<2>(rhs2(field), t0, z0, t0 + d * tol.horizon, tol.ode, std::span(&ev, 1));
  return finish_hit(field, t0, r, tol);
}

VariationalHit hit_switching_variational(const SmoothField& field, double t0, const Vec2& z0, Direction dir,
                                         const Tolerances& tol) {
  const double d = sign_of(dir);
  const double s = departure_sign(field, t0, z0, d, tol);
  const ode::EventFunction<6> ev{[s](double, const ode::State<6>& z) { return s * z[1]; }, true};
  auto r = ode::integrate<6>(rhs6(field), t0, pack(z0), t0 + d * tol.horizon, tol.ode, std::span(&ev, 1));
  HitResult h = finish_hit(field, t0, r, tol);
  return {h, {std::move(r.dense)}};
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Above: return "above";
    case Mode::Below: return "below";
    case Mode::Sliding: return "sliding";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::CrossSigma: return "CrossSigma";
    case EventKind::EnterSliding: return "EnterSliding";
    case EventKind::ExitSlidingAtFold: return "ExitSlidingAtFold";
    case EventKind::TangencyHit: return "TangencyHit";
  }
  return "?";
}

Vec2 HybridTrajectory::state(double t) const {
  if (segments.empty()) return z0;
  const bool fwd = t_end >= t0;
  for (const auto& s : segments) {
    const double a = s.dense.t_begin(), b = s.dense.t_end();
    if (fwd ? (t >= a && t <= b) : (t <= a && t >= b)) return s.dense(t);
  }
  return (fwd ? t < t0 : t > t0) ? z0 : z_end;
}

bool HybridTrajectory::has_sliding() const {
  return std::any_of(segments.begin(), segments.end(), [](const Segment& s) {
    return s.mode == Mode::Sliding && s.dense.t_end() != s.dense.t_begin();
  });
}

double HybridTrajectory::sliding_time() const {
  double acc = 0.0;
  for (const auto& s : segments) {
    if (s.mode == Mode::Sliding) acc += std::abs(s.dense.t_end() - s.dense.t_begin());
  }
  return acc;
}

void HybridTrajectory::write_csv(std::ostream& os, bool header) const {
  if (header) os << "t,x,y,mode,event_flag\n";
  os.precision(12);
  std::size_t next_event = 0;
  for (const auto& seg : segments) {
    for (const auto& st : seg.dense.steps()) {
      os << st.t0 << ',' << st.r1[0] << ',' << st.r1[1] << ',' << to_string(seg.mode) << ",0\n";
    }
    const auto& y = seg.dense.back();
    int flag = 0;
    if (next_event < events.size() && events[next_event].t == seg.dense.t_end()) {
      flag = 1 + static_cast<int>(events[next_event].kind);
      ++next_event;
    }
    os << seg.dense.t_end() << ',' << y[0] << ',' << y[1] << ',' << to_string(seg.mode) << ',' << flag << '\n';
  }
}

namespace {

class HybridRunner {
 public:
  HybridRunner(const FilippovModel& m, const Tolerances& tol, const HybridOptions& opt)
      : m_(m), tol_(tol), opt_(opt), d_(sign_of(opt.direction)) {}

  HybridTrajectory run(double t0, const Vec2& z0, double duration) {
    HybridTrajectory tr;
    tr.t0 = t0;
    tr.z0 = z0;
    const double t_stop = t0 + d_ * std::abs(duration);
    double t = t0;
    Vec2 z = z0;
    Mode mode;
    if (std::abs(z.y()) <= tol_.event) {
      z.y() = 0.0;
      mode = depart(t, z.x(), std::nullopt);
    } else {
      mode = z.y() > 0.0 ? Mode::Above : Mode::Below;
    }
    int stalls = 0;
    while (t != t_stop) {
      if (tr.events.size() > tol_.max_events) {
        throw Error(ErrorCode::TooManyEvents, "more than " + std::to_string(tol_.max_events) + " switching events");
      }
      Step step = mode == Mode::Sliding ? slide(t, z, t_stop) : smooth(mode, t, z, t_stop);
      const bool progressed = step.t != t;
      tr.segments.push_back({mode, std::move(step.dense)});
      t = step.t;
      z = step.z;
      if (!step.event) break;
      stalls = progressed ? 0 : stalls + 1;
      if (stalls > 4) throw Error(ErrorCode::TooManyEvents, "stalled at a switching point");
      HybridEvent ev{t, z.x(), *step.event, mode, step.next};
      tr.events.push_back(ev);
      mode = step.next;
      if (opt_.stop_on.count(ev.kind)) {
        tr.stopped = true;
        break;
      }
    }
    tr.t_end = t;
    tr.z_end = z;
    return tr;
  }

 private:
  struct Step {
    DenseSolution dense;
    double t;
    Vec2 z;
    std::optional<EventKind> event;
    Mode next = Mode::Above;
  };

  // Signed tendency of side s to move away from the line in the current time
  // direction: positive means into y > 0. Falls back on the second Lie
  // derivative at a tangency; 0 flags a degenerate point.
  double tendency(Side s, double t, double x) const {
    const Vec2 z(x, 0.0);
    const Vec2 v = m_.field(s, t, z);
    if (std::abs(v.y()) > tol_.tangency) return d_ * v.y();
    const Mat2 j = m_.jacobian(s, t, z);
    const double lie2 = j(1, 0) * v.x() + j(1, 1) * v.y();
    return std::abs(lie2) > tol_.tangency ? lie2 : 0.0;
  }

  Mode depart(double t, double x, std::optional<Mode> came_from) const {
    const double ep = tendency(Side::Plus, t, x);
    const double em = tendency(Side::Minus, t, x);
    if (ep > 0.0 && em > 0.0) return Mode::Above;
    if (ep < 0.0 && em < 0.0) return Mode::Below;
    if (ep < 0.0 && em > 0.0) return Mode::Sliding;
    if (ep > 0.0 && em < 0.0) {
      if (came_from == Mode::Below) return Mode::Above;
      if (came_from == Mode::Above) return Mode::Below;
      std::ostringstream os;
      os << "both sides leave the line at t=" << t << ", x=" << x;
      throw Error(ErrorCode::NonDeterministicEscape, os.str());
    }
    // Degenerate on one side: follow the side that moves.
    if (ep > 0.0 || em > 0.0) return Mode::Above;
    if (ep < 0.0 || em < 0.0) return Mode::Below;
    throw Error(ErrorCode::DegenerateTangency, "degenerate two-fold at x=" + std::to_string(x));
  }

  Step smooth(Mode mode, double t, const Vec2& z, double t_stop) const {
    const Side side = mode == Mode::Above ? Side::Plus : Side::Minus;
    const double s = mode == Mode::Above ? 1.0 : -1.0;
    const ode::Rhs<2> rhs = [this, side](double tt, const ode::State<2>& zz) -> ode::State<2> {
      return m_.field(side, tt, zz);
    };
    const ode::EventFunction<2> ev{[s](double, const ode::State<2>& zz) { return s * zz[1]; }, true};
    auto r = ode::integrate<2>(rhs, t, z, t_stop, tol_.ode, std::span(&ev, 1));
    throw_on_status(r, "flow_filippov");
    Step out{std::move(r.dense), r.t, r.y, std::nullopt};
    if (r.status != ode::Status::Event) return out;
    out.z.y() = 0.0;
    const double x = out.z.x();
    // Arrival: the other side decides between crossing and sliding.
    const double own = d_ * m_.normal(side, r.t, x);
    if (std::abs(own) <= tol_.tangency) {
      out.event = EventKind::TangencyHit;
      out.next = depart(r.t, x, mode);
      return out;
    }
    const Side other = mode == Mode::Above ? Side::Minus : Side::Plus;
    const double e = tendency(other, r.t, x);
    if (mode == Mode::Above) out.next = e < 0.0 ? Mode::Below : Mode::Sliding;
    else out.next = e > 0.0 ? Mode::Above : Mode::Sliding;
    out.event = out.next == Mode::Sliding ? EventKind::EnterSliding : EventKind::CrossSigma;
    return out;
  }

  Step slide(double t, const Vec2& z, double t_stop) const {
    const ode::Rhs<2> rhs = [this](double tt, const ode::State<2>& zz) -> ode::State<2> {
      return sliding_vector(m_, tt, zz[0]);
    };
    const double d = d_;
    const std::array<ode::EventFunction<2>, 2> evs{
        ode::EventFunction<2>{[this, d](double tt, const ode::State<2>& zz) { return -d * m_.normal(Side::Plus, tt, zz[0]); },
                              true},
        ode::EventFunction<2>{[this, d](double tt, const ode::State<2>& zz) { return d * m_.normal(Side::Minus, tt, zz[0]); },
                              true}};
    auto r = ode::integrate<2>(rhs, t, Vec2(z.x(), 0.0), t_stop, tol_.ode, std::span(evs));
    throw_on_status(r, "flow_filippov (sliding)");
    Step out{std::move(r.dense), r.t, Vec2(r.y[0], 0.0), std::nullopt};
    if (r.status != ode::Status::Event) return out;
    out.event = EventKind::ExitSlidingAtFold;
    out.next = r.event == 0 ? Mode::Above : Mode::Below;
    return out;
  }

  const FilippovModel& m_;
  const Tolerances& tol_;
  const HybridOptions& opt_;
  double d_;
};

}  // namespace

HybridTrajectory flow_filippov(const FilippovModel& model, double t0, const Vec2& z0, double duration,
                               const Tolerances& tol, const HybridOptions& opt) {
  return HybridRunner(model, tol, opt).run(t0, z0, duration);
}

}  // namespace twofold
