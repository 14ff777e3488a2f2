#pragma once

#include "twofold/tolerances.hpp"
#include "twofold/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string_view>

namespace twofold {

using FieldEval = std::function<Vec2(double, const Vec2&)>;
using FieldJac = std::function<Mat2(double, const Vec2&)>;

/// Planar vector field with its spatial Jacobian. A periodic field has its
/// time argument reduced modulo the period before evaluation.
struct SmoothField {
  FieldEval eval;
  FieldJac jac;
  std::optional<double> period;

  Vec2 operator()(double t, const Vec2& z) const { return eval(reduce(t), z); }
  Mat2 jacobian(double t, const Vec2& z) const { return jac(reduce(t), z); }
  double reduce(double t) const;

  static SmoothField zero();
  static SmoothField autonomous(std::function<Vec2(const Vec2&)> f, std::function<Mat2(const Vec2&)> df);
  static SmoothField periodic(FieldEval f, FieldJac df, double period);
};

/// Second-order perturbation H(t, z; eps).
struct SecondOrderField {
  std::function<Vec2(double, const Vec2&, double)> eval;
  std::function<Mat2(double, const Vec2&, double)> jac;
};

enum class Side { Minus, Plus };

/// X^-(t,z) below the line y = 0 and X^+(t,z) above it, each of the form
/// F + eps G + eps^2 H. The fields G and H share the period 2 sigma.
struct FilippovModel {
  SmoothField f_minus;
  SmoothField f_plus;
  SmoothField g_minus = SmoothField::zero();
  SmoothField g_plus = SmoothField::zero();
  std::optional<SecondOrderField> h_minus;
  std::optional<SecondOrderField> h_plus;
  double sigma = 1.0;
  double epsilon = 0.0;

  /// F+ is derived from F- by F+(z) = -R F-(Rz).
  static FilippovModel reversible(SmoothField f_minus, SmoothField g_minus, SmoothField g_plus, double sigma,
                                  double epsilon = 0.0);

  double period() const { return 2.0 * sigma; }
  double reduce(double t) const;

  Vec2 field(Side side, double t, const Vec2& z) const;
  Mat2 jacobian(Side side, double t, const Vec2& z) const;
  /// The assembled one-sided field as a SmoothField (captures a copy).
  SmoothField side_field(Side side) const;
  /// Normal component X^{+-} h at (x, 0).
  double normal(Side side, double t, double x) const;

  FilippovModel with_epsilon(double eps) const;
  /// The model satisfied by z~(t) = R z(-t); swaps the roles of the two sides
  /// so escaping segments become sliding segments.
  FilippovModel time_reversed() const;

  const SmoothField& f(Side s) const { return s == Side::Minus ? f_minus : f_plus; }
  const SmoothField& g(Side s) const { return s == Side::Minus ? g_minus : g_plus; }
};

enum class RegionKind { Crossing, Sliding, Escaping, TangencyPlus, TangencyMinus, TangencyBoth };
enum class Visibility { Visible, Invisible };

std::string_view to_string(RegionKind k);
std::string_view to_string(Visibility v);

RegionKind classify_point(const FilippovModel& model, double t, double x, const Tolerances& tol = {});

/// Sign of the second Lie derivative (X)^2 h = grad(X_2) . X at a tangency.
Visibility fold_visibility(const FilippovModel& model, Side side, double t, double x, const Tolerances& tol = {});

/// Filippov sliding vector (X-h X+ - X+h X-)/(X-h - X+h) at (x, 0); requires
/// the point to lie in a sliding or escaping region.
Vec2 sliding_field(const FilippovModel& model, double t, double x, const Tolerances& tol = {});

/// Same formula without region checks, for use along sliding segments.
Vec2 sliding_vector(const FilippovModel& model, double t, double x);

struct ReversibilityReport {
  double max_defect = 0.0;
  bool reversible = false;
};

/// max ||F+(z) + R F-(Rz)|| over the sample points.
ReversibilityReport check_reversibility(const FilippovModel& model, std::span<const Vec2> grid,
                                        const Tolerances& tol = {});

}  // namespace twofold
