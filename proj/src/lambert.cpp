#include "twofold/lambert.hpp"

#include "twofold/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace twofold {

double lambert_w0(double y) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(y) || y < branch - 1e-15) {
    std::ostringstream os;
    os << "W0 needs y >= -1/e, got " << y;
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  if (y <= branch) return -1.0;
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  double w;
  if (y < -0.25) {
    // Series in p = sqrt(2(e y + 1)) about the branch point.
    const double p = std::sqrt(2.0 * (std::numbers::e * y + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (y < 3.0) {
    w = std::log1p(y);
    w *= 1.0 - std::log1p(w) / (2.0 + w);
  } else {
    const double l1 = std::log(y);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace twofold
