#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quatsync/errors.hpp"
#include "quatsync/integrate.hpp"
#include "quatsync/model.hpp"

namespace quatsync {

namespace detail {

/// Max over oscillator pairs of the 4-component Euclidean difference norm,
/// evaluated on a flat [w | x | y | z] vector.
inline double max_pairwise_diff4(std::span<const double> flat) {
  const std::size_t n = flat.size() / 4;
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dw = flat[a] - flat[b];
      const double dx = flat[n + a] - flat[n + b];
      const double dy = flat[2 * n + a] - flat[2 * n + b];
      const double dz = flat[3 * n + a] - flat[3 * n + b];
      best = std::max(best, std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz));
    }
  }
  return best;
}

/// Max pairwise |w_a - w_b| over the first block of a flat state.
inline double w_spread(std::span<const double> flat) {
  const std::size_t n = flat.size() / 4;
  double lo = flat[0], hi = flat[0];
  for (std::size_t a = 1; a < n; ++a) {
    lo = std::min(lo, flat[a]);
    hi = std::max(hi, flat[a]);
  }
  return hi - lo;
}

/// Max pairwise spread within one component block (block 1 = x, 2 = y, 3 = z).
inline double component_spread(std::span<const double> flat, std::size_t block) {
  const std::size_t n = flat.size() / 4;
  double lo = flat[block * n], hi = flat[block * n];
  for (std::size_t a = 1; a < n; ++a) {
    lo = std::min(lo, flat[block * n + a]);
    hi = std::max(hi, flat[block * n + a]);
  }
  return hi - lo;
}

inline Trajectory slice_from(const Trajectory& traj, double t_from) {
  Trajectory out;
  out.meta = traj.meta;
  out.stop = traj.stop;
  out.stop_time = traj.stop_time;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] >= t_from - 1e-12) {
      out.times.push_back(traj.times[i]);
      out.states.push_back(traj.states[i]);
      out.derivs.push_back(traj.derivs[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Max over pairs of |q_a - q_b| (full 4-component norm).
inline double pairwise_q_diff(const OscillatorState& s) {
  return detail::max_pairwise_diff4(s.to_flat());
}

/// Max over pairs of |dq_a/dt - dq_b/dt|; evaluates the full vector field.
inline double pairwise_qdot_diff(const OscillatorState& s, const ModelParams& p) {
  return detail::max_pairwise_diff4(rhs_full(s, p).to_flat());
}

struct SyncThresholds {
  /// Bound on sup_t max |q_a - q_b| accepted as phase-locking. Generous by
  /// default; the definition only requires finiteness.
  double lock_bound = 10.0;
  /// Convergence threshold for the frequency / phase verdicts.
  double sync_eps = 1e-4;
  /// Fraction of the horizon, measured from the end, over which the
  /// convergence verdicts are evaluated.
  double tail_fraction = 0.2;
};

struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
};

/// Verdicts are observations over the recorded horizon [t_begin, t_end],
/// never a statement about infinite time.
struct SyncReport {
  double max_phase_diff_sup = 0.0;
  double final_freq_spread = 0.0;
  double final_phase_spread = 0.0;
  bool phase_locked = false;
  bool freq_synced = false;
  bool phase_synced = false;
  std::optional<DecayFit> decay_fit;
  double horizon_begin = 0.0;
  double horizon_end = 0.0;
};

/// Classifies a full-model trajectory against the three synchronization
/// notions. Derivative spreads come from the stored sample derivatives, which
/// are exact vector-field evaluations.
inline SyncReport classify(const Trajectory& traj, const ModelParams& p,
                           const SyncThresholds& th = {}) {
  if (traj.size() == 0) throw Error("classify: empty trajectory");
  if (traj.states.front().size() != 4 * p.n_osc())
    throw Error("classify: trajectory state size does not match the model");
  SyncReport r;
  r.horizon_begin = traj.t_begin();
  r.horizon_end = traj.t_end();

  const double tail_start =
      traj.t_end() - th.tail_fraction * (traj.t_end() - traj.t_begin());
  double tail_phase = 0.0, tail_freq = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double d = detail::max_pairwise_diff4(traj.states[i]);
    r.max_phase_diff_sup = std::max(r.max_phase_diff_sup, d);
    if (traj.times[i] >= tail_start) {
      tail_phase = std::max(tail_phase, d);
      tail_freq = std::max(tail_freq, detail::max_pairwise_diff4(traj.derivs[i]));
    }
  }
  r.final_phase_spread = detail::max_pairwise_diff4(traj.states.back());
  r.final_freq_spread = detail::max_pairwise_diff4(traj.derivs.back());
  r.phase_locked = r.max_phase_diff_sup <= th.lock_bound;
  r.freq_synced = tail_freq <= th.sync_eps;
  // phase sync implies locking, so the flag is only set when both hold
  r.phase_synced = tail_phase <= th.sync_eps && r.phase_locked;

  // Exponential fit of the imaginary spread max(v_mn) over the samples where
  // it is still resolvable above rounding noise.
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const OscillatorState s = OscillatorState::from_flat(traj.states[i]);
    const PairwiseDistances d = pairwise_v(s);
    double vmax = 0.0;
    for (double v : d.v) vmax = std::max(vmax, v);
    if (vmax > 1e-13) {
      ts.push_back(traj.times[i]);
      logs.push_back(std::log(vmax));
    }
  }
  if (ts.size() >= 20) {
    double st = 0, sl = 0, stt = 0, stl = 0, sll = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sl += logs[i];
      stt += ts[i] * ts[i];
      stl += ts[i] * logs[i];
      sll += logs[i] * logs[i];
    }
    const double m = static_cast<double>(ts.size());
    const double cov = stl - st * sl / m;
    const double var_t = stt - st * st / m;
    const double var_l = sll - sl * sl / m;
    if (var_t > 0.0 && var_l > 0.0) {
      DecayFit fit;
      fit.rate = -cov / var_t;
      fit.r_squared = (cov * cov) / (var_t * var_l);
      r.decay_fit = fit;
    }
  }
  return r;
}

/// Accumulated energy H(t) = integral of sum_n (dw_n/dt)^2, by the trapezoid
/// rule over the samples. Nondecreasing by construction.
inline std::vector<std::pair<double, double>> lyapunov_energy(const Trajectory& traj,
                                                              const ModelParams& p) {
  const std::size_t n = p.n_osc();
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.size());
  double acc = 0.0;
  double prev_t = 0.0, prev_val = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double val = 0.0;
    for (std::size_t a = 0; a < n; ++a) val += traj.derivs[i][a] * traj.derivs[i][a];
    if (i > 0) acc += 0.5 * (val + prev_val) * (traj.times[i] - prev_t);
    out.emplace_back(traj.times[i], acc);
    prev_t = traj.times[i];
    prev_val = val;
  }
  return out;
}

struct DecayCheck {
  bool holds = false;
  /// Min over samples and components of (bound - actual spread).
  double margin = 0.0;
};

/// Verifies the exponential contraction of the imaginary-part spreads:
/// for each component c in {x, y, z},
///   spread_c(t) <= spread_c(t0) * exp(-lambda sin(delta0) (t - t0))
/// at every sample. Requires the premise max |w_a - w_b| < pi/2 - delta0 to
/// hold throughout; the first violating time raises HypothesisViolatedError.
///
/// Once the spread reaches rounding level it stops shrinking while the bound
/// keeps decaying, so the comparison carries a noise floor of
/// noise_floor_rel * (largest component magnitude at t0); `holds` uses it,
/// `margin` is reported raw.
inline DecayCheck check_exponential_decay(const Trajectory& traj, double lambda,
                                          double delta0,
                                          double noise_floor_rel = 1e-13) {
  if (traj.size() == 0) throw Error("check_exponential_decay: empty trajectory");
  const double premise = std::numbers::pi / 2.0 - delta0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (detail::w_spread(traj.states[i]) >= premise)
      throw HypothesisViolatedError(traj.times[i]);
  }
  const double rate = lambda * std::sin(delta0);
  const double t0 = traj.t_begin();
  double scale = 1.0;
  for (double c : traj.states.front()) scale = std::max(scale, std::abs(c));
  const double floor = noise_floor_rel * scale;
  DecayCheck ck;
  ck.margin = std::numeric_limits<double>::infinity();
  ck.holds = true;
  for (std::size_t block = 1; block <= 3; ++block) {
    const double s0 = detail::component_spread(traj.states.front(), block);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double bound = s0 * std::exp(-rate * (traj.times[i] - t0));
      const double actual = detail::component_spread(traj.states[i], block);
      ck.margin = std::min(ck.margin, bound - actual);
      if (actual > bound + floor) ck.holds = false;
    }
  }
  return ck;
}

/// Latest time by which the real-part spread must have dropped below
/// pi/2 - delta0, given a spread of beta observed at t_star:
///   t_star + (beta - pi/2 + delta0) / (lambda sin(delta) - lambda_c).
inline double locking_transient_bound(double t_star, double beta, double delta0,
                                      double lambda, double delta, double lambda_c) {
  const double rate = lambda * std::sin(delta) - lambda_c;
  if (beta <= std::numbers::pi / 2.0 - delta0) return t_star;
  return t_star + (beta - std::numbers::pi / 2.0 + delta0) / rate;
}

struct StrongDecayResult {
  double delta0 = 0.0;
  double t_c = 0.0;
  /// Real-part spread stayed below pi/2 - delta0 at every sample after t_c.
  bool spread_bounded_after_tc = false;
  DecayCheck decay;
};

/// End-to-end check of the strong-coupling contraction on a trajectory:
/// picks delta0 from the measured real-part spread (maximum over the samples
/// past the transient bound, minus a 0.01 margin off pi/2), computes the
/// transient bound t_c, and runs the exponential-decay verification on the
/// tail from t_c on.
inline StrongDecayResult strong_coupling_decay_check(const Trajectory& traj,
                                                     const ModelParams& p,
                                                     double delta) {
  if (traj.size() < 3) throw Error("trajectory too short");
  const double lambda_c = critical_coupling(p);

  std::vector<double> spread(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    spread[i] = detail::w_spread(traj.states[i]);

  // Seed delta0 from the second half of the run, then refine once with the
  // spread actually attained past t_c.
  const double t_half = 0.5 * (traj.t_begin() + traj.t_end());
  auto max_spread_from = [&](double t_from) {
    double s = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
      if (traj.times[i] >= t_from) s = std::max(s, spread[i]);
    return s;
  };
  std::size_t i_star = 0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    if (spread[i] > spread[i_star]) i_star = i;
  const double beta = spread[i_star];
  const double t_star = traj.times[i_star];

  double delta0 = std::numbers::pi / 2.0 - max_spread_from(t_half) - 0.01;
  if (delta0 <= 0.0) throw HypothesisViolatedError(traj.times[i_star]);
  double t_c = locking_transient_bound(t_star, beta, delta0, p.lambda, delta, lambda_c);
  delta0 = std::numbers::pi / 2.0 - max_spread_from(t_c) - 0.01;
  if (delta0 <= 0.0) throw HypothesisViolatedError(traj.times[i_star]);
  t_c = locking_transient_bound(t_star, beta, delta0, p.lambda, delta, lambda_c);

  StrongDecayResult res;
  res.delta0 = delta0;
  res.t_c = t_c;
  res.spread_bounded_after_tc = true;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] > t_c && spread[i] >= std::numbers::pi / 2.0 - delta0)
      res.spread_bounded_after_tc = false;
  }
  res.decay = check_exponential_decay(detail::slice_from(traj, t_c), p.lambda, delta0);
  return res;
}

}  // namespace quatsync
