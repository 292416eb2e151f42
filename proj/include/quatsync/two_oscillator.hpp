#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "quatsync/errors.hpp"
#include "quatsync/integrate.hpp"
#include "quatsync/math_utils.hpp"
#include "quatsync/model.hpp"
#include "quatsync/planar.hpp"

namespace quatsync::two_osc {

using quatsync::PlanarState;

/// Planar reduction of the two-oscillator system:
/// dw/dt = omega - lambda sin(w) cosh(v), dv/dt = -lambda cos(w) sinh(v).
inline PlanarState rhs(const PlanarState& s, double omega, double lambda,
                       double v_max = 30.0) {
  if (s.v > v_max) throw BlowUpError(0.0, s.v);
  return {omega - lambda * std::sin(s.w) * std::cosh(s.v),
          -lambda * std::cos(s.w) * std::sinh(s.v)};
}

/// Jacobian of the planar vector field, row-major [[dP/dw, dP/dv],
/// [dQ/dw, dQ/dv]]; the drift term omega drops out.
inline std::array<double, 4> jacobian(const PlanarState& s, double lambda) {
  return {-lambda * std::cos(s.w) * std::cosh(s.v),
          -lambda * std::sin(s.w) * std::sinh(s.v),
          lambda * std::sin(s.w) * std::sinh(s.v),
          -lambda * std::cos(s.w) * std::cosh(s.v)};
}

/// k-th equilibrium (2k pi + pi/2, arccosh(omega/lambda)) of the weak-coupling
/// planar system. Throws NotWeakError when lambda >= omega.
inline PlanarState equilibrium(double omega, double lambda, int k = 0) {
  if (lambda >= omega) throw NotWeakError();
  return {2.0 * k * std::numbers::pi + std::numbers::pi / 2.0,
          acosh_log(omega / lambda)};
}

/// Scaled time derivative of L_k = ((w - w_k)^2 + (v - alpha)^2) / 2 along
/// the flow, F_k = (w - w_k)(gamma - sin(w) cosh(v)) - (v - alpha) cos(w) sinh(v)
/// with gamma = omega/lambda, alpha = arccosh(gamma).
inline double lyapunov_rate(const PlanarState& s, int k, double gamma) {
  const double wk = 2.0 * k * std::numbers::pi + std::numbers::pi / 2.0;
  const double alpha = acosh_log(gamma);
  return (s.w - wk) * (gamma - std::sin(s.w) * std::cosh(s.v)) -
         (s.v - alpha) * std::cos(s.w) * std::sinh(s.v);
}

/// Largest half-width eps <= 0.5 of the band (1 +/- eps) alpha on which both
///   |(v - alpha) sinh(v)| < pi gamma / 2   and
///   2 cosh(v) - (v - alpha) sinh(v) > 0
/// hold everywhere; these are exactly the conditions under which F_k is
/// sign-definite on the two half-strips beside the equilibrium. Each
/// condition is bisected separately (tolerance 1e-8, band checked on a fine
/// grid) and the smaller bound is returned.
inline double epsilon_band(double gamma) {
  const double alpha = acosh_log(gamma);
  const double cap = std::numbers::pi * gamma / 2.0;

  auto band_ok = [&](double eps, int which) {
    const int nc = 2001;
    for (int i = 0; i <= nc; ++i) {
      const double v = (1.0 - eps) * alpha + (2.0 * eps * alpha) * i / nc;
      const double h1 = (v - alpha) * std::sinh(v);
      if (which == 1 && std::abs(h1) >= cap) return false;
      if (which == 2 && 2.0 * std::cosh(v) - h1 <= 0.0) return false;
    }
    return true;
  };

  double result = 0.5;
  for (int which = 1; which <= 2; ++which) {
    if (band_ok(0.5, which)) continue;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-8) {
      const double mid = 0.5 * (lo + hi);
      (band_ok(mid, which) ? lo : hi) = mid;
    }
    result = std::min(result, lo);
  }
  return result;
}

struct OrbitReport {
  double period = 0.0;
  double closure_error = 0.0;
  /// Max over sampled offsets tau of |w(T-tau) + w(T+tau) - 2 w_k| where T is
  /// the lower section-crossing time.
  double symmetry_error = 0.0;
  /// Section states: the start (pi/2, v0) and the lower crossing (pi/2, u0).
  PlanarState upper;
  PlanarState lower;
  /// (v0 - alpha, alpha - u0); the second is strictly smaller on every orbit.
  std::array<double, 2> ring_halfwidths{0.0, 0.0};
  Trajectory trace;
};

namespace detail {

inline auto planar_rhs(double omega, double lambda, double v_max = 30.0) {
  return [omega, lambda, v_max](double t, const std::vector<double>& y,
                                std::vector<double>& dy) {
    if (y[1] > v_max) throw BlowUpError(t, y[1]);
    dy[0] = omega - lambda * std::sin(y[0]) * std::cosh(y[1]);
    dy[1] = -lambda * std::cos(y[0]) * std::sinh(y[1]);
  };
}

}  // namespace detail

/// Integrates from (pi/2, v0), v0 > alpha, and closes the orbit at the second
/// crossing of the section w = pi/2. On the section dv/dt = 0, so crossings
/// are told apart by the sign of dw/dt: the lower crossing (v < alpha) moves
/// right, the upper one moves left. Throws NoReturnError when the second
/// crossing does not occur within the configured horizon, NotWeakError when
/// lambda >= omega.
inline OrbitReport detect_periodic_orbit(double v0, double omega, double lambda,
                                         IntegratorConfig cfg = {}) {
  if (lambda >= omega) throw NotWeakError();
  const double alpha = acosh_log(omega / lambda);
  if (v0 <= alpha) throw Error("v0 must lie above the equilibrium value alpha");

  cfg.sample_dt = std::min(cfg.sample_dt, 0.005);
  const double half_pi = std::numbers::pi / 2.0;

  Trajectory traj = integrate(detail::planar_rhs(omega, lambda), {half_pi, v0}, cfg);
  if (traj.stop == StopReason::blow_up) throw BlowUpError(traj.stop_time, 0.0);

  auto section = [half_pi](const std::vector<double>& y) { return y[0] - half_pi; };
  const auto crossings = find_section_crossing(traj, section, CrossingDirection::any);
  if (crossings.size() < 2)
    throw NoReturnError("no orbit closure before t_end; raise t_end or check v0");

  const SectionCrossing& low = crossings[0];
  const SectionCrossing& top = crossings[1];
  if (low.state[1] >= alpha || top.state[1] <= alpha)
    throw NoReturnError("section crossings not in the expected order");

  OrbitReport rep;
  rep.period = top.t;
  rep.lower = {low.state[0], low.state[1]};
  rep.upper = {top.state[0], top.state[1]};
  const double dw = top.state[0] - half_pi;
  const double dv = top.state[1] - v0;
  rep.closure_error = std::sqrt(dw * dw + dv * dv);

  const double t_low = low.t;
  double sym = 0.0;
  const double dt_probe = std::max(cfg.sample_dt, 1e-3);
  for (double tau = dt_probe; tau < t_low; tau += dt_probe) {
    if (t_low + tau > traj.t_end()) break;
    const double w_before = traj.state_at(t_low - tau)[0];
    const double w_after = traj.state_at(t_low + tau)[0];
    sym = std::max(sym, std::abs(w_before + w_after - 2.0 * half_pi));
  }
  rep.symmetry_error = sym;

  rep.ring_halfwidths = {v0 - alpha, alpha - rep.lower.v};
  if (!(rep.ring_halfwidths[1] < rep.ring_halfwidths[0] - 1e-9))
    throw Error("ring half-width contraction violated; orbit data inconsistent");
  rep.trace = std::move(traj);
  return rep;
}

/// Runs the full 8-dimensional two-oscillator model alongside the planar
/// reduction and returns the max deviation between (w_1 - w_2, v_12) and the
/// planar (w, v) over one period. The initial imaginary difference of norm v0
/// is placed in the (x, y) plane along the direction (1, 1.05).
inline double lift_check(double v0, double omega, double lambda, double t_end,
                         IntegratorConfig cfg = {}) {
  cfg.t_end = t_end;
  cfg.sample_dt = std::min(cfg.sample_dt, 0.005);

  Trajectory planar =
      integrate(detail::planar_rhs(omega, lambda), {std::numbers::pi / 2.0, v0}, cfg);

  ModelParams p;
  p.omegas = {omega / 2.0, -omega / 2.0};
  p.lambda = lambda;
  const double dir = std::sqrt(1.0 + 1.05 * 1.05);
  const double dx = v0 * 1.0 / dir, dy = v0 * 1.05 / dir;
  const std::vector<double> y0 = {std::numbers::pi / 4.0, -std::numbers::pi / 4.0,
                                  dx / 2.0, -dx / 2.0, dy / 2.0, -dy / 2.0, 0.0, 0.0};
  Trajectory full = integrate(model_rhs(p), y0, cfg);

  double dev = 0.0;
  const std::size_t m = std::min(planar.size(), full.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double>& yf = full.states[i];
    const double w_diff = yf[0] - yf[1];
    const double ex = yf[2] - yf[3], ey = yf[4] - yf[5], ez = yf[6] - yf[7];
    const double v12 = std::sqrt(ex * ex + ey * ey + ez * ez);
    dev = std::max(dev, std::abs(w_diff - planar.states[i][0]));
    dev = std::max(dev, std::abs(v12 - planar.states[i][1]));
  }
  return dev;
}

}  // namespace quatsync::two_osc
