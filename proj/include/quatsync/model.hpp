#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "quatsync/errors.hpp"
#include "quatsync/math_utils.hpp"

namespace quatsync {

/// Natural frequencies and coupling strength of the N-oscillator system.
struct ModelParams {
  std::vector<double> omegas;
  double lambda = 1.0;
  /// Guard on pairwise imaginary distances; cosh/sinh of anything beyond
  /// this is treated as trajectory divergence (BlowUpError).
  double v_max = 30.0;

  std::size_t n_osc() const { return omegas.size(); }

  void validate() const {
    if (omegas.size() < 2) throw std::invalid_argument("need at least 2 oscillators");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    if (v_max <= 0.0) throw std::invalid_argument("v_max must be positive");
  }
};

/// Per-oscillator state at one instant, split into the four quaternion
/// components. Flattened layout is [w_1..w_N, x_1..x_N, y_1..y_N, z_1..z_N]
/// so generic integrators can treat the state opaquely.
struct OscillatorState {
  std::vector<double> w, x, y, z;

  std::size_t size() const { return w.size(); }

  static OscillatorState from_flat(std::span<const double> flat) {
    const std::size_t n = flat.size() / 4;
    OscillatorState s;
    s.w.assign(flat.begin(), flat.begin() + n);
    s.x.assign(flat.begin() + n, flat.begin() + 2 * n);
    s.y.assign(flat.begin() + 2 * n, flat.begin() + 3 * n);
    s.z.assign(flat.begin() + 3 * n, flat.begin() + 4 * n);
    return s;
  }

  std::vector<double> to_flat() const {
    std::vector<double> flat;
    flat.reserve(4 * size());
    flat.insert(flat.end(), w.begin(), w.end());
    flat.insert(flat.end(), x.begin(), x.end());
    flat.insert(flat.end(), y.begin(), y.end());
    flat.insert(flat.end(), z.begin(), z.end());
    return flat;
  }
};

/// Symmetric matrix of pairwise Euclidean distances between the imaginary
/// parts, v_mn = |(x_m, y_m, z_m) - (x_n, y_n, z_n)|. Zero diagonal.
struct PairwiseDistances {
  std::size_t n = 0;
  std::vector<double> v;  // row-major n*n

  double operator()(std::size_t m, std::size_t k) const { return v[m * n + k]; }
};

inline PairwiseDistances pairwise_v(const OscillatorState& s) {
  const std::size_t n = s.size();
  PairwiseDistances d;
  d.n = n;
  d.v.assign(n * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = m + 1; k < n; ++k) {
      const double dx = s.x[m] - s.x[k];
      const double dy = s.y[m] - s.y[k];
      const double dz = s.z[m] - s.z[k];
      const double v = std::sqrt(dx * dx + dy * dy + dz * dz);
      d.v[m * n + k] = v;
      d.v[k * n + m] = v;
    }
  }
  return d;
}

/// Time derivative of the separated system, written on the flat layout:
///   dw_n = omega_n + (lambda/N) sum_m sin(w_m - w_n) cosh(v_mn)
///   dx_n =           (lambda/N) sum_m cos(w_m - w_n) sinh(v_mn) (x_m - x_n)/v_mn
/// (and likewise for y, z). The sinh(v)/v factor goes through sinhc, so
/// coincident imaginary parts (v_mn = 0, including m = n) contribute exactly
/// (x_m - x_n) cos(w_m - w_n). Throws BlowUpError when any v_mn > v_max.
inline void rhs_full_flat(const ModelParams& p, double t, std::span<const double> y,
                          std::span<double> dy) {
  const std::size_t n = p.n_osc();
  const auto w = y.subspan(0, n);
  const auto x = y.subspan(n, n);
  const auto yy = y.subspan(2 * n, n);
  const auto z = y.subspan(3 * n, n);
  for (double& d : dy) d = 0.0;

  const double g = p.lambda / static_cast<double>(n);
  for (std::size_t a = 0; a < n; ++a) {
    dy[a] += p.omegas[a];
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = x[b] - x[a];
      const double dyv = yy[b] - yy[a];
      const double dz = z[b] - z[a];
      const double v = std::sqrt(dx * dx + dyv * dyv + dz * dz);
      if (v > p.v_max) throw BlowUpError(t, v);
      const double dw = w[b] - w[a];
      const double sin_cosh = std::sin(dw) * std::cosh(v);
      const double cos_shc = std::cos(dw) * sinhc(v);
      // contribution of pair (a, b) to both oscillators
      dy[a] += g * sin_cosh;
      dy[b] -= g * sin_cosh;
      dy[n + a] += g * cos_shc * dx;
      dy[n + b] -= g * cos_shc * dx;
      dy[2 * n + a] += g * cos_shc * dyv;
      dy[2 * n + b] -= g * cos_shc * dyv;
      dy[3 * n + a] += g * cos_shc * dz;
      dy[3 * n + b] -= g * cos_shc * dz;
    }
  }
}

inline OscillatorState rhs_full(const OscillatorState& s, const ModelParams& p,
                                double t = 0.0) {
  const std::vector<double> y = s.to_flat();
  std::vector<double> dy(y.size());
  rhs_full_flat(p, t, y, dy);
  return OscillatorState::from_flat(dy);
}

/// Callable adapter for the generic integrators.
inline auto model_rhs(const ModelParams& p) {
  return [p](double t, const std::vector<double>& y, std::vector<double>& dy) {
    rhs_full_flat(p, t, y, dy);
  };
}

/// Shifts every natural frequency by -mean(omega), so the returned
/// parameters have zero-sum frequencies (rotating frame).
inline ModelParams to_rotating_frame(const ModelParams& p) {
  ModelParams q = p;
  const double mean =
      std::accumulate(p.omegas.begin(), p.omegas.end(), 0.0) / p.n_osc();
  for (double& om : q.omegas) om -= mean;
  return q;
}

/// Critical coupling strength: the largest pairwise natural-frequency gap,
/// max(omega) - min(omega).
inline double critical_coupling(const ModelParams& p) {
  const auto [lo, hi] = std::minmax_element(p.omegas.begin(), p.omegas.end());
  return *hi - *lo;
}

}  // namespace quatsync
