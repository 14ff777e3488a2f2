#include "twofold/fields.hpp"

#include "twofold/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace twofold {

double SmoothField::reduce(double t) const {
  if (!period) return t;
  const double p = *period;
  double r = std::fmod(t, p);
  if (r < 0.0) r += p;
  return r;
}

SmoothField SmoothField::zero() {
  return {[](double, const Vec2&) { return Vec2::Zero().eval(); }, [](double, const Vec2&) { return Mat2::Zero().eval(); },
          std::nullopt};
}

SmoothField SmoothField::autonomous(std::function<Vec2(const Vec2&)> f, std::function<Mat2(const Vec2&)> df) {
  return {[f](double, const Vec2& z) { return f(z); }, [df](double, const Vec2& z) { return df(z); }, std::nullopt};
}

SmoothField SmoothField::periodic(FieldEval f, FieldJac df, double period) {
  return {std::move(f), std::move(df), period};
}

FilippovModel FilippovModel::reversible(SmoothField f_minus, SmoothField g_minus, SmoothField g_plus, double sigma,
                                        double epsilon) {
  FilippovModel m;
  const Mat2 r = reflection_matrix();
  SmoothField fm = f_minus;
  m.f_plus = {[fm](double t, const Vec2& z) { return Vec2(-reflect(fm(t, reflect(z)))); },
              [fm, r](double t, const Vec2& z) { return Mat2(-r * fm.jacobian(t, reflect(z)) * r); }, fm.period};
  m.f_minus = std::move(f_minus);
  m.g_minus = std::move(g_minus);
  m.g_plus = std::move(g_plus);
  m.sigma = sigma;
  m.epsilon = epsilon;
  return m;
}

double FilippovModel::reduce(double t) const {
  const double p = period();
  double r = std::fmod(t, p);
  if (r < 0.0) r += p;
  return r;
}

Vec2 FilippovModel::field(Side side, double t, const Vec2& z) const {
  const double tr = reduce(t);
  Vec2 v = f(side)(tr, z);
  if (epsilon != 0.0) {
    v += epsilon * g(side)(tr, z);
    const auto& h = side == Side::Minus ? h_minus : h_plus;
    if (h) v += epsilon * epsilon * h->eval(tr, z, epsilon);
  }
  return v;
}

Mat2 FilippovModel::jacobian(Side side, double t, const Vec2& z) const {
  const double tr = reduce(t);
  Mat2 m = f(side).jacobian(tr, z);
  if (epsilon != 0.0) {
    m += epsilon * g(side).jacobian(tr, z);
    const auto& h = side == Side::Minus ? h_minus : h_plus;
    if (h) m += epsilon * epsilon * h->jac(tr, z, epsilon);
  }
  return m;
}

SmoothField FilippovModel::side_field(Side side) const {
  auto self = std::make_shared<const FilippovModel>(*this);
  return {[self, side](double t, const Vec2& z) { return self->field(side, t, z); },
          [self, side](double t, const Vec2& z) { return self->jacobian(side, t, z); }, period()};
}

double FilippovModel::normal(Side side, double t, double x) const { return field(side, t, Vec2(x, 0.0)).y(); }

FilippovModel FilippovModel::with_epsilon(double eps) const {
  FilippovModel m = *this;
  m.epsilon = eps;
  return m;
}

namespace {

// z~(t) = R z(-t): the field on side s of the new model is -R X^{other}(-t, Rz).
SmoothField reverse_field(const SmoothField& src) {
  const Mat2 r = reflection_matrix();
  return {[src](double t, const Vec2& z) { return Vec2(-reflect(src(-t, reflect(z)))); },
          [src, r](double t, const Vec2& z) { return Mat2(-r * src.jacobian(-t, reflect(z)) * r); }, src.period};
}

std::optional<SecondOrderField> reverse_field(const std::optional<SecondOrderField>& src) {
  if (!src) return std::nullopt;
  const Mat2 r = reflection_matrix();
  SecondOrderField h = *src;
  return SecondOrderField{
      [h](double t, const Vec2& z, double e) { return Vec2(-reflect(h.eval(-t, reflect(z), e))); },
      [h, r](double t, const Vec2& z, double e) { return Mat2(-r * h.jac(-t, reflect(z), e) * r); }};
}

}  // namespace

FilippovModel FilippovModel::time_reversed() const {
  FilippovModel m;
  m.f_minus = reverse_field(f_plus);
  m.f_plus = reverse_field(f_minus);
  m.g_minus = reverse_field(g_plus);
  m.g_plus = reverse_field(g_minus);
  m.h_minus = reverse_field(h_plus);
  m.h_plus = reverse_field(h_minus);
  m.sigma = sigma;
  m.epsilon = epsilon;
  return m;
}

std::string_view to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Crossing: return "Crossing";
    case RegionKind::Sliding: return "Sliding";
    case RegionKind::Escaping: return "Escaping";
    case RegionKind::TangencyPlus: return "TangencyPlus";
    case RegionKind::TangencyMinus: return "TangencyMinus";
    case RegionKind::TangencyBoth: return "TangencyBoth";
  }
  return "Unknown";
}

std::string_view to_string(Visibility v) { return v == Visibility::Visible ? "Visible" : "Invisible"; }

RegionKind classify_point(const FilippovModel& model, double t, double x, const Tolerances& tol) {
  const double np = model.normal(Side::Plus, t, x);
  const double nm = model.normal(Side::Minus, t, x);
  const bool tp = std::abs(np) <= tol.tangency;
  const bool tm = std::abs(nm) <= tol.tangency;
  if (tp && tm) return RegionKind::TangencyBoth;
  if (tp) return RegionKind::TangencyPlus;
  if (tm) return RegionKind::TangencyMinus;
  if (np * nm > 0.0) return RegionKind::Crossing;
  return np < 0.0 ? RegionKind::Sliding : RegionKind::Escaping;
}

Visibility fold_visibility(const FilippovModel& model, Side side, double t, double x, const Tolerances& tol) {
  const Vec2 z(x, 0.0);
  const Vec2 v = model.field(side, t, z);
  const Mat2 j = model.jacobian(side, t, z);
  const double lie2 = j(1, 0) * v.x() + j(1, 1) * v.y();
  if (std::abs(lie2) <= tol.tangency) {
    std::ostringstream os;
    os << "second Lie derivative " << lie2 << " at x=" << x;
    throw Error(ErrorCode::DegenerateTangency, os.str());
  }
  if (side == Side::Plus) return lie2 > 0.0 ? Visibility::Visible : Visibility::Invisible;
  return lie2 < 0.0 ? Visibility::Visible : Visibility::Invisible;
}

Vec2 sliding_vector(const FilippovModel& model, double t, double x) {
  const Vec2 z(x, 0.0);
  const Vec2 xp = model.field(Side::Plus, t, z);
  const Vec2 xm = model.field(Side::Minus, t, z);
  const double den = xm.y() - xp.y();
  return (xm.y() * xp - xp.y() * xm) / den;
}

Vec2 sliding_field(const FilippovModel& model, double t, double x, const Tolerances& tol) {
  const double np = model.normal(Side::Plus, t, x);
  const double nm = model.normal(Side::Minus, t, x);
  if (std::abs(nm - np) <= tol.tangency) {
    std::ostringstream os;
    os << "X-h - X+h = " << nm - np << " at x=" << x;
    throw Error(ErrorCode::DivisionDegeneracy, os.str());
  }
  const RegionKind k = classify_point(model, t, x, tol);
  if (k != RegionKind::Sliding && k != RegionKind::Escaping) {
    throw Error(ErrorCode::NotSlidingRegion, "point x=" + std::to_string(x) + " is " + std::string(to_string(k)));
  }
  return sliding_vector(model, t, x);
}

ReversibilityReport check_reversibility(const FilippovModel& model, std::span<const Vec2> grid, const Tolerances& tol) {
  ReversibilityReport rep;
  for (const Vec2& z : grid) {
    const Vec2 d = model.f_plus(0.0, z) + reflect(model.f_minus(0.0, reflect(z)));
    rep.max_defect = std::max(rep.max_defect, d.norm());
  }
  rep.reversible = rep.max_defect <= tol.reversibility;
  return rep;
}

}  // namespace twofold
