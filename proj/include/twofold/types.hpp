#pragma once

#include <Eigen/Dense>

namespace twofold {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// The involution R(x, y) = (x, -y); its fixed set is the switching line.
inline Vec2 reflect(const Vec2& z) { return {z.x(), -z.y()}; }

inline Mat2 reflection_matrix() {
  Mat2 r;
  r << 1.0, 0.0, 0.0, -1.0;
  return r;
}

/// (a1, a2) ^ (b1, b2) = <(-a2, a1), (b1, b2)>.
inline double wedge(const Vec2& a, const Vec2& b) { return -a.y() * b.x() + a.x() * b.y(); }

/// Inverse of a 2x2 matrix by the adjugate formula; the caller checks det.
inline Mat2 adjugate_inverse(const Mat2& m, double det) {
  Mat2 inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

}  // namespace twofold
