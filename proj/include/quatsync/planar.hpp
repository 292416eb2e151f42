#pragma once

#include <array>
#include <complex>
#include <string>

#include "quatsync/errors.hpp"

namespace quatsync {

/// State of a planar (w, v) reduction: w the real-part phase difference,
/// v >= 0 the imaginary-part distance.
struct PlanarState {
  double w = 0.0;
  double v = 0.0;
};

/// Eigenvalues of a row-major 2x2 real matrix.
inline std::array<std::complex<double>, 2> eig2x2(const std::array<double, 4>& j) {
  const double tr = j[0] + j[3];
  const double det = j[0] * j[3] - j[1] * j[2];
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

enum class EqClass { sink, source, saddle, center_candidate };

inline const char* to_string(EqClass c) {
  switch (c) {
    case EqClass::sink: return "sink";
    case EqClass::source: return "source";
    case EqClass::saddle: return "saddle";
    case EqClass::center_candidate: return "center_candidate";
  }
  return "?";
}

struct EquilibriumReport {
  PlanarState location;
  std::array<std::complex<double>, 2> eigenvalues;
  EqClass classification = EqClass::center_candidate;
  /// Enclosing rectangle the root was isolated in: {w_lo, w_hi, v_lo, v_hi}.
  std::array<double, 4> bracket{0.0, 0.0, 0.0, 0.0};
  bool on_axis = false;
  double residual = 0.0;
};

/// Classification by eigenvalue real-part signs with a 1e-10 dead band for
/// the neutral case.
inline EqClass classify_eigenvalues(const std::array<std::complex<double>, 2>& eig) {
  const double re1 = eig[0].real(), re2 = eig[1].real();
  const double tol = 1e-10;
  if (std::abs(re1) <= tol || std::abs(re2) <= tol) return EqClass::center_candidate;
  if (re1 < 0.0 && re2 < 0.0) return EqClass::sink;
  if (re1 > 0.0 && re2 > 0.0) return EqClass::source;
  return EqClass::saddle;
}

}  // namespace quatsync
