#pragma once

#include <cmath>

#include "quatsync/math_utils.hpp"

namespace quatsync {

/// Quaternion value w + x i + y j + z k with i^2 = j^2 = k^2 = ijk = -1.
/// Immutable-by-convention value type; every function here is pure.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}

inline Quaternion operator*(double s, const Quaternion& q) {
  return {s * q.w, s * q.x, s * q.y, s * q.z};
}

/// Hamilton product.
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline double norm(const Quaternion& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

/// Norm of the imaginary part, sqrt(x^2 + y^2 + z^2).
inline double imag_norm(const Quaternion& q) {
  return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
}

namespace detail {

/// Assembles s + c * (x i + y j + z k) / rho where rho = |imag(q)| and
/// c/rho is passed as the already-regularized ratio.
inline Quaternion scalar_plus_scaled_imag(double s, double ratio, const Quaternion& q) {
  return {s, ratio * q.x, ratio * q.y, ratio * q.z};
}

}  // namespace detail

/// exp(q) = e^w (cos(rho) + sin(rho)/rho * (x i + y j + z k)), rho = |imag(q)|.
/// The ratio sin(rho)/rho goes through sinc, so rho = 0 yields (e^w, 0, 0, 0).
inline Quaternion quat_exp(const Quaternion& q) {
  const double rho = imag_norm(q);
  const double ew = std::exp(q.w);
  return detail::scalar_plus_scaled_imag(ew * std::cos(rho), ew * sinc(rho), q);
}

/// sin(q) = sin(w) cosh(rho) + cos(w) sinh(rho)/rho * (x i + y j + z k).
inline Quaternion quat_sin(const Quaternion& q) {
  const double rho = imag_norm(q);
  return detail::scalar_plus_scaled_imag(std::sin(q.w) * std::cosh(rho),
                                         std::cos(q.w) * sinhc(rho), q);
}

/// cos(q) = cos(w) cosh(rho) - sin(w) sinh(rho)/rho * (x i + y j + z k).
/// The minus sign on the imaginary term is the one the matrix power series
/// produces (see series_reference); the complex restriction cos(w + i x) =
/// cos(w) cosh(x) - i sin(w) sinh(x) agrees.
inline Quaternion quat_cos(const Quaternion& q) {
  const double rho = imag_norm(q);
  return detail::scalar_plus_scaled_imag(std::cos(q.w) * std::cosh(rho),
                                         -std::sin(q.w) * sinhc(rho), q);
}

}  // namespace quatsync
