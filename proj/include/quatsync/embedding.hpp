#pragma once

#include <algorithm>
#include <complex>

#include "quatsync/errors.hpp"
#include "quatsync/quaternion.hpp"

namespace quatsync {

/// 2x2 complex matrix, row-major. The image of the quaternion embedding is
/// the set M = { ((a, b), (c, d)) : a = conj(d), b = -conj(c) }.
struct Complex2x2 {
  std::complex<double> a, b, c, d;
};

inline Complex2x2 operator+(const Complex2x2& m, const Complex2x2& n) {
  return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
}

inline Complex2x2 operator*(const Complex2x2& m, const Complex2x2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline Complex2x2 operator*(double s, const Complex2x2& m) {
  return {s * m.a, s * m.b, s * m.c, s * m.d};
}

inline std::complex<double> det(const Complex2x2& m) { return m.a * m.d - m.b * m.c; }

/// Max entrywise deviation from the membership conditions a = conj(d),
/// b = -conj(c). Zero (up to rounding) on the image of embed().
inline double membership_deviation(const Complex2x2& m) {
  return std::max(std::abs(m.a - std::conj(m.d)), std::abs(m.b + std::conj(m.c)));
}

/// Pauli-matrix representation of a quaternion:
///   phi(w + x i + y j + z k) = ((w - z i, -y - x i), (y - x i, w + z i)),
/// i.e. phi(1) = I, phi(i) = -i sigma_x, phi(j) = -i sigma_y, phi(k) = -i sigma_z.
inline Complex2x2 embed(const Quaternion& q) {
  return {{q.w, -q.z}, {-q.y, -q.x}, {q.y, -q.x}, {q.w, q.z}};
}

inline constexpr double kEmbedTolerance = 1e-10;

/// Inverse of embed(). Throws NotInMError if the matrix deviates from the
/// membership conditions by more than tol.
inline Quaternion unembed(const Complex2x2& m, double tol = kEmbedTolerance) {
  const double dev = membership_deviation(m);
  if (dev > tol) throw NotInMError(dev);
  return {0.5 * (m.a.real() + m.d.real()), -0.5 * (m.b.imag() + m.c.imag()),
          0.5 * (m.c.real() - m.b.real()), 0.5 * (m.d.imag() - m.a.imag())};
}

enum class SeriesFn { exp, sin, cos };

/// Reference evaluation of exp/sin/cos through the defining matrix power
/// series applied to embed(q):
///   exp(A) = sum A^n / n!,  sin(A) = sum (-1)^n A^(2n+1) / (2n+1)!,
///   cos(A) = sum (-1)^n A^(2n) / (2n)!.
/// `terms` partial-sum terms are taken; 30 suffices for |q| <= 4, where the
/// first dropped exp term is bounded by 4^30/30! ~ 4e-15. Intended as an
/// independent check of the closed forms, not for production use.
inline Quaternion series_reference(const Quaternion& q, SeriesFn fn, int terms = 30) {
  const Complex2x2 A = embed(q);
  const Complex2x2 I{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  const Complex2x2 A2 = A * A;

  Complex2x2 sum{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  switch (fn) {
    case SeriesFn::exp: {
      Complex2x2 term = I;  // A^n / n!
      for (int n = 0; n < terms; ++n) {
        sum = sum + term;
        term = (1.0 / (n + 1)) * (term * A);
      }
      break;
    }
    case SeriesFn::sin: {
      Complex2x2 term = A;  // (-1)^n A^(2n+1) / (2n+1)!
      for (int n = 0; n < terms; ++n) {
        sum = sum + term;
        term = (-1.0 / ((2 * n + 2) * (2 * n + 3))) * (term * A2);
      }
      break;
    }
    case SeriesFn::cos: {
      Complex2x2 term = I;  // (-1)^n A^(2n) / (2n)!
      for (int n = 0; n < terms; ++n) {
        sum = sum + term;
        term = (-1.0 / ((2 * n + 1) * (2 * n + 2))) * (term * A2);
      }
      break;
    }
  }
  // A drift past the membership tolerance here would mean the series left M,
  // which signals a bug; let unembed flag it.
  return unembed(sum);
}

}  // namespace quatsync
