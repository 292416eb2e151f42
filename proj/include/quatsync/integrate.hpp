#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quatsync/errors.hpp"

namespace quatsync {

enum class Method { rk4_fixed, rk45_adaptive };

enum class StopReason { completed, blow_up, max_steps };

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  /// Fixed step size, or the initial step guess in adaptive mode.
  double dt = 1e-3;
  double rtol = 1e-9;
  double atol = 1e-12;
  double t_end = 100.0;
  /// Spacing of recorded samples; the stepper lands on sample times exactly,
  /// so stored states carry no interpolation error. <= 0 records every
  /// accepted step instead.
  double sample_dt = 0.01;
  long max_steps = 10'000'000;

  void validate() const {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (rtol < 1e-14) throw std::invalid_argument("rtol must be >= 1e-14");
    if (atol < 1e-16) throw std::invalid_argument("atol must be >= 1e-16");
    if (t_end <= 0.0) throw std::invalid_argument("t_end must be positive");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  }
};

struct IntegratorMeta {
  long steps_taken = 0;
  long steps_rejected = 0;
  long rhs_evals = 0;
};

/// Recorded trajectory: strictly increasing sample times with matching state
/// and derivative vectors (the derivative enables cubic Hermite dense output).
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> derivs;
  IntegratorMeta meta;
  StopReason stop = StopReason::completed;
  double stop_time = 0.0;

  std::size_t size() const { return times.size(); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  /// Cubic Hermite interpolant between the two samples bracketing t.
  std::vector<double> state_at(double t) const {
    if (times.empty()) throw Error("empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    return hermite(i, (t - times[i]) / (times[i + 1] - times[i]));
  }

  std::vector<double> hermite(std::size_t i, double theta) const {
    const double h = times[i + 1] - times[i];
    const std::vector<double>& y0 = states[i];
    const std::vector<double>& y1 = states[i + 1];
    const std::vector<double>& f0 = derivs[i];
    const std::vector<double>& f1 = derivs[i + 1];
    std::vector<double> out(y0.size());
    const double u = theta, u1 = 1.0 - theta;
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = u1 * y0[k] + u * y1[k] +
               u * (u - 1.0) *
                   ((1.0 - 2.0 * u) * (y1[k] - y0[k]) + (u - 1.0) * h * f0[k] +
                    u * h * f1[k]);
    }
    return out;
  }
};

namespace detail {

/// One classical RK4 step. f is f(t, y, dy); work buffers supplied by caller.
template <typename F>
void rk4_step(F&& f, double t, double dt, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t n = y.size();
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

/// Single classical fourth-order Runge-Kutta step; local error O(dt^5).
template <typename F>
std::vector<double> step_rk4(F&& f, const std::vector<double>& s, double t, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  std::vector<double> y = s;
  std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
      tmp(y.size());
  detail::rk4_step(f, t, dt, y, k1, k2, k3, k4, tmp);
  return y;
}

/// Integrates y' = f(t, y) from t = 0 to cfg.t_end and records samples.
///
/// rk45_adaptive uses the Dormand-Prince 5(4) embedded pair with the
/// componentwise criterion |err_i| <= atol + rtol*|y_i| and step factor
/// 0.9 (tol/err)^(1/5) clamped to [0.2, 5]. rk4_fixed subdivides each sample
/// interval into equal steps no longer than cfg.dt.
///
/// BlowUpError from f ends the integration early with the partial trajectory
/// (stop = blow_up); exceeding max_steps likewise (stop = max_steps).
template <typename F>
Trajectory integrate(F&& f, const std::vector<double>& y0, const IntegratorConfig& cfg) {
  cfg.validate();
  const std::size_t n = y0.size();
  Trajectory traj;

  std::vector<double> y = y0;
  std::vector<double> fy(n);
  double t = 0.0;

  auto record = [&](const std::vector<double>& deriv) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(deriv);
  };

  try {
    f(t, y, fy);
    traj.meta.rhs_evals++;
    record(fy);

    const double sample = cfg.sample_dt > 0.0 ? cfg.sample_dt : cfg.t_end;
    const long n_samples = std::max<long>(1, std::lround(std::ceil(cfg.t_end / sample - 1e-9)));

    if (cfg.method == Method::rk4_fixed) {
      std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
      for (long s = 1; s <= n_samples; ++s) {
        const double t_target = std::min(s * sample, cfg.t_end);
        const long nsub = std::max<long>(
            1, std::lround(std::ceil((t_target - t) / cfg.dt - 1e-9)));
        const double h = (t_target - t) / nsub;
        for (long j = 0; j < nsub; ++j) {
          if (traj.meta.steps_taken >= cfg.max_steps) {
            traj.stop = StopReason::max_steps;
            traj.stop_time = t;
            return traj;
          }
          detail::rk4_step(f, t, h, y, k1, k2, k3, k4, tmp);
          traj.meta.rhs_evals += 4;
          traj.meta.steps_taken++;
          t = (j + 1 == nsub) ? t_target : t + h;
        }
        f(t, y, fy);
        traj.meta.rhs_evals++;
        record(fy);
      }
      traj.stop_time = t;
      return traj;
    }

    // Dormand-Prince 5(4), FSAL.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b(5th) - b(4th embedded)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<double> k1 = fy, k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n),
                        ynew(n);
    double h = std::min(cfg.dt, cfg.t_end);
    long next_sample = 1;

    while (t < cfg.t_end) {
      const double t_target = std::min(next_sample * sample, cfg.t_end);
      const bool hit_sample = t + h >= t_target - 1e-14 * std::max(1.0, std::abs(t_target));
      const double hs = hit_sample ? t_target - t : h;

      if (traj.meta.steps_taken + traj.meta.steps_rejected >= cfg.max_steps) {
        traj.stop = StopReason::max_steps;
        traj.stop_time = t;
        return traj;
      }

      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
      f(t + c2 * hs, ytmp, k2);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      f(t + c3 * hs, ytmp, k3);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(t + c4 * hs, ytmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(t + c5 * hs, ytmp, k5);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                               a65 * k5[i]);
      f(t + hs, ytmp, k6);
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                               b6 * k6[i]);
      f(t + hs, ynew, k7);
      traj.meta.rhs_evals += 6;

      double err_ratio = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double err = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                 e6 * k6[i] + e7 * k7[i]);
        const double scale =
            cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err_ratio = std::max(err_ratio, std::abs(err) / scale);
      }

      if (err_ratio <= 1.0) {
        t = hit_sample ? t_target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        traj.meta.steps_taken++;
        if (hit_sample || cfg.sample_dt <= 0.0) {
          fy = k1;
          record(fy);
          if (hit_sample) next_sample++;
        }
      } else {
        traj.meta.steps_rejected++;
      }
      const double factor =
          0.9 * std::pow(err_ratio > 0.0 ? 1.0 / err_ratio : 1e10, 0.2);
      h = hs * std::clamp(factor, 0.2, 5.0);
      h = std::max(h, 1e-14 * std::max(1.0, std::abs(t)));
    }
    traj.stop_time = t;
    return traj;
  } catch (const BlowUpError& e) {
    traj.stop = StopReason::blow_up;
    traj.stop_time = e.t;
    return traj;
  }
}

enum class CrossingDirection { up, down, any };

struct SectionCrossing {
  double t;
  std::vector<double> state;
};

/// Locates zeros of g(state(t)) along a trajectory. Each strict sign change
/// between adjacent samples (matching the requested direction) is refined by
/// bisection on the Hermite interpolant until |g| < 1e-10 or the bracket is
/// exhausted. Samples where g is exactly zero are not themselves reported.
inline std::vector<SectionCrossing> find_section_crossing(
    const Trajectory& traj, const std::function<double(const std::vector<double>&)>& g,
    CrossingDirection direction = CrossingDirection::any) {
  std::vector<SectionCrossing> out;
  if (traj.size() < 2) return out;
  double g_prev = g(traj.states.front());
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double g_next = g(traj.states[i + 1]);
    const bool crosses = g_prev < 0.0 ? g_next > 0.0 : (g_prev > 0.0 && g_next < 0.0);
    const bool wanted = direction == CrossingDirection::any ||
                        (direction == CrossingDirection::up && g_prev < 0.0) ||
                        (direction == CrossingDirection::down && g_prev > 0.0);
    if (crosses && wanted) {
      double lo = 0.0, hi = 1.0;
      double glo = g_prev;
      std::vector<double> state;
      double gm = g_prev;
      double mid = 0.5;
      for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        state = traj.hermite(i, mid);
        gm = g(state);
        if (std::abs(gm) < 1e-10 || hi - lo < 1e-16) break;
        if ((gm > 0.0) == (glo > 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back({traj.times[i] + mid * (traj.times[i + 1] - traj.times[i]),
                     std::move(state)});
    }
    g_prev = g_next;
  }
  return out;
}

}  // namespace quatsync
