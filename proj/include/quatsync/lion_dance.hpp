#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "quatsync/errors.hpp"
#include "quatsync/integrate.hpp"
#include "quatsync/math_utils.hpp"
#include "quatsync/model.hpp"
#include "quatsync/planar.hpp"

namespace quatsync::lion {

using quatsync::PlanarState;

/// Parameters of the Lion Dance reduction: omega is the full spread of the
/// arithmetic-progression natural frequencies (omega_1 - omega_N, which
/// equals the critical coupling), lambda the coupling, n_osc >= 3.
struct LionParams {
  double omega = 1.0;
  double lambda = 0.5;
  int n_osc = 3;
  double v_max = 30.0;

  void validate() const {
    if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    if (n_osc < 3) throw std::invalid_argument("the reduction needs n_osc >= 3");
  }
};

/// dw/dt = omega/(N-1) - (lambda/N) sum_{m=1}^{N-1} sin(m w) cosh(m v)
/// dv/dt =             - (lambda/N) sum_{m=1}^{N-1} cos(m w) sinh(m v)
inline PlanarState rhs(const PlanarState& s, const LionParams& p) {
  if ((p.n_osc - 1) * s.v > p.v_max) throw BlowUpError(0.0, (p.n_osc - 1) * s.v);
  const double g = p.lambda / p.n_osc;
  double dw = p.omega / (p.n_osc - 1);
  double dv = 0.0;
  for (int m = 1; m < p.n_osc; ++m) {
    dw -= g * std::sin(m * s.w) * std::cosh(m * s.v);
    dv -= g * std::cos(m * s.w) * std::sinh(m * s.v);
  }
  return {dw, dv};
}

/// Row-major Jacobian of the flow. It has the rotation-scaling structure
/// J11 = J22, J21 = -J12 at every point, so both eigenvalues share the real
/// part J11.
inline std::array<double, 4> jacobian(const PlanarState& s, const LionParams& p) {
  const double g = p.lambda / p.n_osc;
  double d11 = 0.0, d12 = 0.0;
  for (int m = 1; m < p.n_osc; ++m) {
    d11 -= g * m * std::cos(m * s.w) * std::cosh(m * s.v);
    d12 -= g * m * std::sin(m * s.w) * std::sinh(m * s.v);
  }
  return {d11, d12, -d12, d11};
}

/// Closed form for the shared eigenvalue real part at a point,
/// -(lambda/N) sum m cos(m w) cosh(m v).
inline double eigenvalue_real_part(const PlanarState& s, const LionParams& p) {
  return jacobian(s, p)[0];
}

inline auto planar_rhs(const LionParams& p) {
  return [p](double t, const std::vector<double>& y, std::vector<double>& dy) {
    if ((p.n_osc - 1) * y[1] > p.v_max) throw BlowUpError(t, (p.n_osc - 1) * y[1]);
    const PlanarState d = rhs({y[0], y[1]}, p);
    dy[0] = d.w;
    dy[1] = d.v;
  };
}

/// Sum of the axis drift harmonics, h(w) = sum_{m=1}^{N-1} sin(m w).
inline double sine_sum(double w, int n_osc) {
  double s = 0.0;
  for (int m = 1; m < n_osc; ++m) s += std::sin(m * w);
  return s;
}

inline double sine_sum_deriv(double w, int n_osc) {
  double s = 0.0;
  for (int m = 1; m < n_osc; ++m) s += m * std::cos(m * w);
  return s;
}

/// Global maximum of sine_sum on (0, pi): coarse scan, golden-section search,
/// then bisection on the derivative to 1e-12. Returns (argmax, max value).
inline std::pair<double, double> sine_sum_max(int n_osc) {
  const double pi = std::numbers::pi;
  const int nscan = 4096;
  double best_w = pi / 2.0, best = -1e300;
  for (int i = 1; i < nscan; ++i) {
    const double w = pi * i / nscan;
    const double h = sine_sum(w, n_osc);
    if (h > best) {
      best = h;
      best_w = w;
    }
  }
  double a = std::max(1e-12, best_w - pi / nscan);
  double b = std::min(pi - 1e-12, best_w + pi / nscan);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 60; ++it) {
    if (sine_sum(c, n_osc) > sine_sum(d, n_osc))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  // derivative changes sign across the maximum; bisect it down to 1e-12
  double mid = 0.5 * (a + b);
  double lo = mid, hi = mid;
  for (int k = 1; k <= 20 && sine_sum_deriv(lo, n_osc) <= 0.0; ++k)
    lo = std::max(1e-12, mid - k * 1e-4);
  for (int k = 1; k <= 20 && sine_sum_deriv(hi, n_osc) >= 0.0; ++k)
    hi = std::min(pi - 1e-12, mid + k * 1e-4);
  if (sine_sum_deriv(lo, n_osc) > 0.0 && sine_sum_deriv(hi, n_osc) < 0.0) {
    while (hi - lo > 1e-12) {
      mid = 0.5 * (lo + hi);
      (sine_sum_deriv(mid, n_osc) > 0.0 ? lo : hi) = mid;
    }
    mid = 0.5 * (lo + hi);
  }
  return {mid, sine_sum(mid, n_osc)};
}

/// Coupling strength at which axis (v = 0) equilibria are born by tangency
/// of the axis drift: Lambda_c = N omega / ((N-1) max_w sum sin(m w)).
inline double lambda_critical(const LionParams& p) {
  return p.n_osc * p.omega / ((p.n_osc - 1) * sine_sum_max(p.n_osc).second);
}

enum class RegimeTag { super_weak, critically_weak, weak, at_or_above_lambda_c };

inline const char* to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::super_weak: return "super_weak";
    case RegimeTag::critically_weak: return "critically_weak";
    case RegimeTag::weak: return "weak";
    case RegimeTag::at_or_above_lambda_c: return "at_or_above_lambda_c";
  }
  return "?";
}

struct Regime {
  RegimeTag tag;
  double lambda_crit;  // Lambda_c
  double lambda_c;     // = omega for the Lion Dance frequency layout
};

inline Regime classify_regime(const LionParams& p) {
  Regime r;
  r.lambda_crit = lambda_critical(p);
  r.lambda_c = p.omega;
  if (std::abs(p.lambda - r.lambda_crit) <= 1e-12)
    r.tag = RegimeTag::critically_weak;
  else if (p.lambda < r.lambda_crit)
    r.tag = RegimeTag::super_weak;
  else if (p.lambda < r.lambda_c)
    r.tag = RegimeTag::weak;
  else
    r.tag = RegimeTag::at_or_above_lambda_c;
  return r;
}

/// Cubic whose root is sin(2w) at any interior (v > 0) equilibrium of the
/// three-oscillator flow: p(x) = 4x^3 + (6 omega/lambda) x^2 - 3x - 6 omega/lambda.
inline double cubic_p(double x, const LionParams& p) {
  if (p.n_osc != 3) throw std::invalid_argument("cubic_p is specific to n_osc = 3");
  const double r = 6.0 * p.omega / p.lambda;
  return 4.0 * x * x * x + r * x * x - 3.0 * x - r;
}

/// The four solutions r_1 < r_2 < r_3 < r_4 in (0, 2 pi) of
/// -cos(w)/cos(2w) = 2, i.e. cos(r_{1,4}) = (-1 + sqrt(33))/8 and
/// cos(r_{2,3}) = (-1 - sqrt(33))/8. They bound the w-intervals that can
/// carry interior equilibria of the three-oscillator flow.
inline std::array<double, 4> boundary_roots() {
  const double c14 = (-1.0 + std::sqrt(33.0)) / 8.0;
  const double c23 = (-1.0 - std::sqrt(33.0)) / 8.0;
  const double r1 = std::acos(c14);
  const double r2 = std::acos(c23);
  return {r1, r2, 2.0 * std::numbers::pi - r2, 2.0 * std::numbers::pi - r1};
}

namespace detail {

/// 2D Newton with residual-monotone damping. Returns the refined point, or
/// nullopt when 50 iterations do not reach |rhs| < 1e-12.
inline std::optional<PlanarState> newton_refine(PlanarState s, const LionParams& p) {
  auto res_norm = [&](const PlanarState& q) {
    const PlanarState f = rhs(q, p);
    return std::max(std::abs(f.w), std::abs(f.v));
  };
  double r = res_norm(s);
  for (int it = 0; it < 50; ++it) {
    if (r < 1e-12) return s;
    const PlanarState f = rhs(s, p);
    const std::array<double, 4> j = jacobian(s, p);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double dw = (j[3] * f.w - j[1] * f.v) / det;
    const double dv = (j[0] * f.v - j[2] * f.w) / det;
    double step = 1.0;
    for (int halvings = 0; halvings < 30; ++halvings) {
      const PlanarState trial{s.w - step * dw, s.v - step * dv};
      const double rt = res_norm(trial);
      if (rt < r) {
        s = trial;
        r = rt;
        break;
      }
      step *= 0.5;
      if (halvings == 29) return std::nullopt;
    }
  }
  return res_norm(s) < 1e-12 ? std::optional<PlanarState>(s) : std::nullopt;
}

}  // namespace detail

/// Roots of the axis drift omega/(N-1) = (lambda/N) sum sin(m w) on [0, 2 pi).
/// Simple sign-change roots are bisected; tangencies (a zero that is also a
/// minimum of the drift, exactly at critically weak coupling) are located
/// through the drift derivative and admitted when the drift there vanishes to
/// rounding (< 1e-10). A lambda measurably below the critical value has a
/// strictly positive drift minimum and correctly yields no axis root.
inline std::vector<double> axis_equilibria(const LionParams& p) {
  const double two_pi = 2.0 * std::numbers::pi;
  auto drift = [&](double w) {
    return p.omega / (p.n_osc - 1) - (p.lambda / p.n_osc) * sine_sum(w, p.n_osc);
  };
  std::vector<double> roots;
  const int nscan = 8192;
  double w_prev = 0.0, f_prev = drift(0.0);
  for (int i = 1; i <= nscan; ++i) {
    const double w = two_pi * i / nscan;
    const double f = drift(w);
    if ((f_prev < 0.0 && f > 0.0) || (f_prev > 0.0 && f < 0.0)) {
      double lo = w_prev, hi = w, flo = f_prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = drift(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    } else if (f_prev > 0.0 && f > 0.0) {
      // Tangency candidates: drift minimum between sign-preserving samples.
      const double d_prev = -sine_sum_deriv(w_prev, p.n_osc);
      const double d_here = -sine_sum_deriv(w, p.n_osc);
      if (d_prev < 0.0 && d_here > 0.0) {
        double lo = w_prev, hi = w;
        while (hi - lo > 1e-13) {
          const double mid = 0.5 * (lo + hi);
          (-sine_sum_deriv(mid, p.n_osc) < 0.0 ? lo : hi) = mid;
        }
        const double w_min = 0.5 * (lo + hi);
        if (std::abs(drift(w_min)) < 1e-10) roots.push_back(w_min);
      }
    }
    w_prev = w;
    f_prev = f;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Classifies a known equilibrium of the flow through the analytic Jacobian.
/// Throws NotEquilibriumError when the residual exceeds 1e-10.
inline EquilibriumReport classify_equilibrium(const PlanarState& loc,
                                              const LionParams& p) {
  const PlanarState f = rhs(loc, p);
  const double res = std::max(std::abs(f.w), std::abs(f.v));
  if (res >= 1e-10) throw NotEquilibriumError(res);
  EquilibriumReport rep;
  rep.location = loc;
  rep.residual = res;
  rep.eigenvalues = eig2x2(jacobian(loc, p));
  rep.classification = classify_eigenvalues(rep.eigenvalues);
  rep.on_axis = std::abs(loc.v) < 1e-9;
  return rep;
}

/// Equilibria of the three-oscillator flow in one period R_0 = [0, 2 pi) x
/// {v >= 0}, for weak coupling (lambda < omega). Interior (v > 0) equilibria
/// are located by the horizontal-cutting construction: on any interior
/// equilibrium cosh(v) = -cos(w)/(2 cos(2w)), so the problem reduces to a 1D
/// root search of f(w, v(w)) on (pi/4, r1) and (r3, 5 pi/4); each candidate
/// is then polished by 2D Newton. Axis equilibria come from axis_equilibria.
inline std::vector<EquilibriumReport> find_equilibria_n3(const LionParams& p) {
  if (p.n_osc != 3) throw std::invalid_argument("find_equilibria_n3 needs n_osc = 3");
  if (p.lambda >= p.omega) throw NotWeakError();
  const double pi = std::numbers::pi;
  const auto r = boundary_roots();

  auto g2 = [](double w) { return -std::cos(w) / std::cos(2.0 * w); };
  auto cut_v = [&](double w) { return std::acosh(std::max(1.0, g2(w) / 2.0)); };
  auto f_cut = [&](double w) {
    const double v = cut_v(w);
    return 3.0 * p.omega / (2.0 * p.lambda) -
           (std::sin(w) * std::cosh(v) + std::sin(2.0 * w) * std::cosh(2.0 * v));
  };

  std::vector<EquilibriumReport> out;
  const std::array<std::pair<double, double>, 2> intervals = {
      std::pair{pi / 4.0 + 1e-9, r[0] - 1e-12},
      std::pair{r[2] + 1e-12, 5.0 * pi / 4.0 - 1e-9}};
  for (const auto& [wa, wb] : intervals) {
    const int nscan = 512;
    double w_prev = wa, f_prev = f_cut(wa);
    for (int i = 1; i <= nscan; ++i) {
      const double w = wa + (wb - wa) * i / nscan;
      const double f = f_cut(w);
      if ((f_prev < 0.0 && f > 0.0) || (f_prev > 0.0 && f < 0.0)) {
        double lo = w_prev, hi = w, flo = f_prev;
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f_cut(mid);
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double w_root = 0.5 * (lo + hi);
        // the cut already satisfies the dv/dt equation, so the bisected root
        // is an equilibrium to rounding even when Newton declines to move
        PlanarState seed{w_root, cut_v(w_root)};
        const auto refined = detail::newton_refine(seed, p);
        const PlanarState loc = refined.value_or(seed);
        const PlanarState res = rhs(loc, p);
        if (std::max(std::abs(res.w), std::abs(res.v)) >= 1e-10) {
          w_prev = w;
          f_prev = f;
          continue;
        }
        EquilibriumReport rep = classify_equilibrium(loc, p);
        rep.bracket = {w_prev, w, std::max(0.0, loc.v - 1e-3), loc.v + 1e-3};
        out.push_back(rep);
      }
      w_prev = w;
      f_prev = f;
    }
  }

  for (double w0 : axis_equilibria(p)) {
    EquilibriumReport rep = classify_equilibrium({w0, 0.0}, p);
    rep.on_axis = true;
    rep.bracket = {w0 - 1e-6, w0 + 1e-6, 0.0, 0.0};
    out.push_back(rep);
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.location.w < b.location.w;
  });
  // collapse duplicates (an interior root that slid onto an axis tangency)
  std::vector<EquilibriumReport> dedup;
  for (const auto& e : out) {
    if (!dedup.empty()) {
      const auto& q = dedup.back();
      const double dw = e.location.w - q.location.w;
      const double dv = e.location.v - q.location.v;
      if (std::sqrt(dw * dw + dv * dv) < 1e-6) continue;
    }
    dedup.push_back(e);
  }
  return dedup;
}

struct SweepGrid {
  int nw = 400;
  int nv = 200;
  double v_max = 3.0;
};

/// Grid sweep for equilibria of the flow at any N >= 3 over one period
/// [0, 2 pi) x (0, v_max]. Cells whose corners change sign in both components
/// seed 2D Newton; converged roots are wrapped into the period, deduplicated
/// at distance 1e-6 and classified. Axis equilibria are appended from the 1D
/// axis scan (flagged on_axis). Results are sorted by (w, v).
inline std::vector<EquilibriumReport> equilibrium_sweep(const LionParams& p,
                                                        const SweepGrid& grid = {}) {
  const double two_pi = 2.0 * std::numbers::pi;
  const int nw = grid.nw, nv = grid.nv;
  std::vector<double> P((nw + 1) * (nv + 1)), Q((nw + 1) * (nv + 1));
  for (int i = 0; i <= nw; ++i) {
    for (int j = 0; j <= nv; ++j) {
      const PlanarState f =
          rhs({two_pi * i / nw, grid.v_max * j / nv}, p);
      P[i * (nv + 1) + j] = f.w;
      Q[i * (nv + 1) + j] = f.v;
    }
  }
  auto cell_changes_sign = [&](const std::vector<double>& F, int i, int j) {
    const double f00 = F[i * (nv + 1) + j], f01 = F[i * (nv + 1) + j + 1];
    const double f10 = F[(i + 1) * (nv + 1) + j], f11 = F[(i + 1) * (nv + 1) + j + 1];
    const double lo = std::min(std::min(f00, f01), std::min(f10, f11));
    const double hi = std::max(std::max(f00, f01), std::max(f10, f11));
    return lo < 0.0 && hi > 0.0;
  };

  std::vector<EquilibriumReport> found;
  for (int i = 0; i < nw; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (!cell_changes_sign(P, i, j) || !cell_changes_sign(Q, i, j)) continue;
      const double wc = two_pi * (i + 0.5) / nw;
      const double vc = grid.v_max * (j + 0.5) / nv;
      const auto refined = detail::newton_refine({wc, vc}, p);
      if (!refined) continue;
      PlanarState loc = *refined;
      loc.w = std::fmod(loc.w, two_pi);
      if (loc.w < 0.0) loc.w += two_pi;
      // Near-axis roots belong to the 1D axis scan below. Around an axis
      // tangency the field is quadratically flat, so Newton can "converge"
      // anywhere in a v ~ 1e-6 neighbourhood of it; genuine interior
      // equilibria of the studied regimes sit at v > 0.05.
      if (loc.v < 1e-4 || loc.v > grid.v_max + 0.5) continue;
      EquilibriumReport rep = classify_equilibrium(loc, p);
      rep.bracket = {two_pi * i / nw, two_pi * (i + 1) / nw, grid.v_max * j / nv,
                     grid.v_max * (j + 1) / nv};
      found.push_back(rep);
    }
  }
  for (double w0 : axis_equilibria(p)) {
    EquilibriumReport rep = classify_equilibrium({w0, 0.0}, p);
    rep.on_axis = true;
    rep.bracket = {w0 - 1e-6, w0 + 1e-6, 0.0, 0.0};
    found.push_back(rep);
  }

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.location.w != b.location.w) return a.location.w < b.location.w;
    return a.location.v < b.location.v;
  });
  std::vector<EquilibriumReport> dedup;
  for (const auto& e : found) {
    bool dup = false;
    for (const auto& q : dedup) {
      double dw = std::abs(e.location.w - q.location.w);
      dw = std::min(dw, two_pi - dw);
      const double dv = e.location.v - q.location.v;
      if (std::sqrt(dw * dw + dv * dv) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) dedup.push_back(e);
  }
  return dedup;
}

inline int sink_count(const std::vector<EquilibriumReport>& eqs) {
  int n = 0;
  for (const auto& e : eqs)
    if (e.classification == EqClass::sink) ++n;
  return n;
}

/// Runs the full 4N model with arithmetic-progression frequencies and initial
/// phases realizing (w, v) = init, next to the planar reduction, and returns
/// the worst deviation between the two: consecutive-pair differences against
/// the planar trace, plus the spread among the pairwise identities that the
/// invariant manifold requires to coincide.
inline double manifold_consistency(const LionParams& p, const PlanarState& init,
                                   double t_end, IntegratorConfig cfg = {}) {
  cfg.t_end = t_end;
  cfg.sample_dt = std::min(cfg.sample_dt, 0.01);

  Trajectory planar = integrate(planar_rhs(p), {init.w, init.v}, cfg);
  if (planar.stop == StopReason::blow_up) throw BlowUpError(planar.stop_time, 0.0);

  const int n = p.n_osc;
  ModelParams mp;
  mp.lambda = p.lambda;
  mp.v_max = p.v_max;
  mp.omegas.resize(n);
  for (int i = 0; i < n; ++i)
    mp.omegas[i] = p.omega * (n - 1 - 2 * i) / (2.0 * (n - 1));
  std::vector<double> y0(4 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    y0[i] = -init.w * i;      // w block
    y0[n + i] = -init.v * i;  // x block carries the imaginary separation
  }
  Trajectory full = integrate(model_rhs(mp), y0, cfg);
  if (full.stop == StopReason::blow_up) throw BlowUpError(full.stop_time, 0.0);

  double dev = 0.0;
  const std::size_t m = std::min(planar.size(), full.size());
  for (std::size_t k = 0; k < m; ++k) {
    const std::vector<double>& y = full.states[k];
    const double v_ref = planar.states[k][1];
    const double w_ref = planar.states[k][0];
    for (int i = 0; i + 1 < n; ++i) {
      const double wd = y[i] - y[i + 1];
      const double xd = y[n + i] - y[n + i + 1];
      const double yd = y[2 * n + i] - y[2 * n + i + 1];
      const double zd = y[3 * n + i] - y[3 * n + i + 1];
      const double vd = std::sqrt(xd * xd + yd * yd + zd * zd);
      dev = std::max(dev, std::abs(wd - w_ref));
      dev = std::max(dev, std::abs(vd - v_ref));
    }
  }
  return dev;
}

}  // namespace quatsync::lion
