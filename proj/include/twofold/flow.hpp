#pragma once

#include "twofold/fields.hpp"
#include "twofold/ode.hpp"

#include <iosfwd>
#include <set>
#include <vector>

namespace twofold {

using DenseSolution = ode::Dense<2>;

enum class Direction { Forward, Backward };

inline double sign_of(Direction d) { return d == Direction::Forward ? 1.0 : -1.0; }

/// Integrate z' = field(t, z) from (t0, z0) over `duration` (negative runs
/// backward in time).
DenseSolution flow_smooth(const SmoothField& field, double t0, const Vec2& z0, double duration,
                          const Tolerances& tol = {});

/// State and fundamental matrix co-integrated; the 6-vector is (z, Y col-major).
struct VariationalSolution {
  ode::Dense<6> dense;

  Vec2 state(double t) const;
  Mat2 fundamental(double t) const;
  double t_begin() const { return dense.t_begin(); }
  double t_end() const { return dense.t_end(); }
};

VariationalSolution flow_variational(const SmoothField& field, double t0, const Vec2& z0, double duration,
                                     const Tolerances& tol = {});

struct HitResult {
  double elapsed = 0.0;  // signed time from t0 to the hit
  double t = 0.0;        // absolute time of the hit
  Vec2 point = Vec2::Zero();
  double normal_speed = 0.0;  // F_2 at the hit
};

/// First return of the smooth flow to y = 0. A start on the line is allowed
/// when the flow leaves it (transversally or from a fold).
HitResult hit_switching(const SmoothField& field, double t0, const Vec2& z0, Direction dir,
                        const Tolerances& tol = {});

/// hit_switching together with the variational solution up to the hit.
struct VariationalHit {
  HitResult hit;
  VariationalSolution solution;
};

VariationalHit hit_switching_variational(const SmoothField& field, double t0, const Vec2& z0, Direction dir,
                                         const Tolerances& tol = {});

enum class Mode { Above, Below, Sliding };
enum class EventKind { CrossSigma, EnterSliding, ExitSlidingAtFold, TangencyHit };

std::string_view to_string(Mode m);
std::string_view to_string(EventKind k);

struct Segment {
  Mode mode;
  DenseSolution dense;
};

struct HybridEvent {
  double t;
  double x;
  EventKind kind;
  Mode from;
  Mode to;
};

struct HybridOptions {
  Direction direction = Direction::Forward;
  std::set<EventKind> stop_on;  // terminate right after an event of these kinds
};

struct HybridTrajectory {
  double t0 = 0.0;
  Vec2 z0 = Vec2::Zero();
  double t_end = 0.0;
  Vec2 z_end = Vec2::Zero();
  bool stopped = false;  // ended on a stop_on event rather than the time limit
  std::vector<Segment> segments;
  std::vector<HybridEvent> events;

  Vec2 state(double t) const;
  bool has_sliding() const;
  double sliding_time() const;
  /// Columns t,x,y,mode,event_flag; rows at every accepted step, event_flag
  /// is 0 or 1 + the EventKind index at event rows.
  void write_csv(std::ostream& os, bool header = true) const;
};

/// Filippov solution from (t0, z0) for |duration| time units in the chosen
/// direction. Backward runs treat the escaping region as attracting.
HybridTrajectory flow_filippov(const FilippovModel& model, double t0, const Vec2& z0, double duration,
                               const Tolerances& tol = {}, const HybridOptions& opt = {});

}  // namespace twofold
