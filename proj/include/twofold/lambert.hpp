#pragma once

namespace twofold {

/// Principal branch of the Lambert W function, w e^w = y for y >= -1/e.
/// Throws OutOfDomain below the branch point.
double lambert_w0(double y);

}  // namespace twofold
