#pragma once

#include <cmath>

namespace quatsync {

/// sinh(v)/v with its removable singularity filled in. Below 1e-4 the direct
/// quotient loses nothing yet, but the Taylor branch keeps the expression
/// exact at v = 0 and free of 0/0.
inline double sinhc(double v) {
  if (std::abs(v) < 1e-4) {
    const double v2 = v * v;
    return 1.0 + v2 / 6.0 + v2 * v2 / 120.0 + v2 * v2 * v2 / 5040.0;
  }
  return std::sinh(v) / v;
}

/// sin(v)/v, same branching as sinhc.
inline double sinc(double v) {
  if (std::abs(v) < 1e-4) {
    const double v2 = v * v;
    return 1.0 - v2 / 6.0 + v2 * v2 / 120.0 - v2 * v2 * v2 / 5040.0;
  }
  return std::sin(v) / v;
}

/// Inverse hyperbolic cosine as the explicit logarithm ln(x + sqrt(x^2 - 1)),
/// defined on x >= 1.
inline double acosh_log(double x) { return std::log(x + std::sqrt(x * x - 1.0)); }

}  // namespace quatsync
