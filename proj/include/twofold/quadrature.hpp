#pragma once

#include "twofold/types.hpp"

#include <functional>
#include <span>

namespace twofold {

struct QuadResult {
  Vec2 value = Vec2::Zero();
  double error = 0.0;  // sum of |Kronrod - Gauss| over accepted panels
  int panels = 0;
};

/// Adaptive 15-point Gauss-Kronrod for a vector integrand. The interval is
/// first split at `breaks` (sorted, first and last are the limits; either
/// order of integration is fine); a panel is bisected while its error
/// exceeds its share of `tol`.
QuadResult integrate_gk15(const std::function<Vec2(double)>& f, std::span<const double> breaks, double tol = 1e-9,
                          int max_depth = 20);

QuadResult integrate_gk15(const std::function<Vec2(double)>& f, double a, double b, double tol = 1e-9);

}  // namespace twofold
