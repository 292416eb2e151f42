// Acceptance suite: one test per advertised guarantee, each printing a
// single [ACCEPTANCE] PASS/FAIL line with its runtime budget enforced.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "quatsync/embedding.hpp"
#include "quatsync/integrate.hpp"
#include "quatsync/lion_dance.hpp"
#include "quatsync/math_utils.hpp"
#include "quatsync/model.hpp"
#include "quatsync/quaternion.hpp"
#include "quatsync/sync.hpp"
#include "quatsync/two_oscillator.hpp"
#include "reference_runs.hpp"

namespace quatsync {
namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Reporter {
  std::string label;
  explicit Reporter(std::string l) : label(std::move(l)) {}
  ~Reporter() {
    std::printf("[ACCEPTANCE] %-52s %s\n", label.c_str(),
                ::testing::Test::HasFailure() ? "FAIL" : "PASS");
    std::fflush(stdout);
  }
};

TEST(Acceptance, C01_QuaternionClosedFormsMatchSeries) {
  Reporter rep("1 quaternion closed forms vs 30-term series");
  Stopwatch timer;
  std::mt19937 rng(20240101);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q{u(rng), u(rng), u(rng), u(rng)};  // norm <= 3
    const Quaternion fe = quat_exp(q), fs = quat_sin(q), fc = quat_cos(q);
    const Quaternion re = series_reference(q, SeriesFn::exp, 30);
    const Quaternion rs = series_reference(q, SeriesFn::sin, 30);
    const Quaternion rc = series_reference(q, SeriesFn::cos, 30);
    for (const auto& [got, want] :
         {std::pair{fe, re}, std::pair{fs, rs}, std::pair{fc, rc}}) {
      ASSERT_NEAR(got.w, want.w, 1e-10);
      ASSERT_NEAR(got.x, want.x, 1e-10);
      ASSERT_NEAR(got.y, want.y, 1e-10);
      ASSERT_NEAR(got.z, want.z, 1e-10);
    }
  }
  EXPECT_LT(timer.seconds(), 1.0);
}

TEST(Acceptance, C02_StrongCouplingFiveOscillators) {
  Reporter rep("2 strong coupling N=5: lock, freq sync, decay bound");
  Stopwatch timer;
  const ModelParams p = testing::five_osc_params();
  const Trajectory traj = testing::five_osc_run(100.0);
  ASSERT_EQ(traj.stop, StopReason::completed);

  // (a) pairwise derivative spread below 1e-4 over the final 20%
  double tail_freq = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.times[i] >= 80.0)
      tail_freq = std::max(tail_freq, detail::max_pairwise_diff4(traj.derivs[i]));
  EXPECT_LT(tail_freq, 1e-4);

  // (b) sup of the pairwise phase diff is finite and non-increasing after its
  // last local maximum
  std::vector<double> D(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    D[i] = detail::max_pairwise_diff4(traj.states[i]);
  double sup = 0.0;
  for (double d : D) sup = std::max(sup, d);
  EXPECT_TRUE(std::isfinite(sup));
  std::size_t last_max = 0;
  for (std::size_t i = 1; i + 1 < D.size(); ++i)
    if (D[i] >= D[i - 1] && D[i] >= D[i + 1]) last_max = i;
  for (std::size_t i = last_max; i + 1 < D.size(); ++i)
    ASSERT_LE(D[i + 1], D[i] + 1e-9) << "rise after last local max at t=" << traj.times[i];

  // (c) exponential contraction bound with delta0 from the measured spread
  const StrongDecayResult res = strong_coupling_decay_check(traj, p, kPi / 2.0);
  EXPECT_TRUE(res.spread_bounded_after_tc);
  EXPECT_TRUE(res.decay.holds);
  EXPECT_GT(res.delta0, 0.0);

  EXPECT_LT(timer.seconds(), 5.0);
}

TEST(Acceptance, C03_IdenticalFrequenciesPhaseSynchronize) {
  Reporter rep("3 phase synchronization at identical frequencies");
  ModelParams p = testing::five_osc_params();
  p.omegas = {0.0, 0.0, 0.0, 0.0, 0.0};
  const Trajectory traj = testing::five_osc_run(100.0, p);
  EXPECT_LT(detail::max_pairwise_diff4(traj.states.back()), 1e-4);
}

TEST(Acceptance, C04_TwoOscillatorPeriodicOrbit) {
  Reporter rep("4 two-oscillator weak orbit: closure, symmetry, lift");
  Stopwatch timer;
  const double omega = 2.0, lambda = 1.0;
  const double v0 = std::sqrt(2.1025);
  const double alpha = acosh_log(omega / lambda);

  const two_osc::OrbitReport orbit =
      two_osc::detect_periodic_orbit(v0, omega, lambda);
  EXPECT_LT(orbit.closure_error, 1e-6);
  EXPECT_LT(orbit.symmetry_error, 1e-6);
  EXPECT_LT(two_osc::lift_check(v0, omega, lambda, orbit.period), 1e-7);

  double prev_vmax = 1e300;
  for (int k = 3; k >= 1; --k) {
    const double vk = alpha + (v0 - alpha) * k / 3.0;
    const two_osc::OrbitReport ring =
        two_osc::detect_periodic_orbit(vk, omega, lambda);
    EXPECT_LT(ring.ring_halfwidths[1], ring.ring_halfwidths[0]);  // alpha-u0 < v0-alpha
    double vmax = 0.0;
    for (const auto& s : ring.trace.states) vmax = std::max(vmax, s[1]);
    EXPECT_LT(vmax, prev_vmax);  // strictly nested
    prev_vmax = vmax;
  }
  EXPECT_LT(timer.seconds(), 5.0);
}

TEST(Acceptance, C05_LyapunovRegionsAndCenterJacobian) {
  Reporter rep("5 Lyapunov sign regions and center linearization");
  const double gamma = 2.0;
  const double alpha = acosh_log(gamma);
  const double eps = two_osc::epsilon_band(gamma);
  ASSERT_GT(eps, 0.0);
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = (1.0 - eps) * alpha + (2.0 * eps * alpha) * (j + 0.5) / n;
      ASSERT_LT(two_osc::lyapunov_rate({(kPi / 2) * (i + 0.5) / n, v}, 0, gamma), 0.0);
      ASSERT_GT(
          two_osc::lyapunov_rate({kPi / 2 + (kPi / 2) * (i + 0.5) / n, v}, 0, gamma),
          0.0);
    }
  }
  const auto j = two_osc::jacobian({kPi / 2, alpha}, 1.0);
  EXPECT_LT(std::abs(j[0] + j[3]), 1e-12);
  const auto eig = eig2x2(j);
  EXPECT_LT(std::abs(eig[0].real()), 1e-10);
  EXPECT_LT(std::abs(eig[1].real()), 1e-10);
  EXPECT_GT(std::abs(eig[0].imag()), 1.0);
}

TEST(Acceptance, C06_CriticalCouplingValue) {
  Reporter rep("6 Lambda_c(N=3, omega=1) = 0.85218915");
  EXPECT_NEAR(lion::lambda_critical({1.0, 0.5, 3}), 0.85218915, 1e-8);
}

TEST(Acceptance, C07_LionDanceRegimes) {
  Reporter rep("7 three-oscillator regimes and bifurcation bracket");
  Stopwatch timer;
  const auto r = lion::boundary_roots();

  // (a) super weak
  {
    const auto eqs = lion::find_equilibria_n3({1.0, 0.426095, 3});
    ASSERT_EQ(eqs.size(), 2u);
    EXPECT_EQ(eqs[0].classification, EqClass::source);
    EXPECT_GT(eqs[0].location.w, kPi / 4);
    EXPECT_LT(eqs[0].location.w, r[0]);
    EXPECT_GT(eqs[0].location.v, 0.0);
    EXPECT_EQ(eqs[1].classification, EqClass::sink);
    EXPECT_GT(eqs[1].location.w, r[2]);
    EXPECT_LT(eqs[1].location.w, 5 * kPi / 4);
    EXPECT_GT(eqs[1].location.v, 0.0);
    for (const auto& e : eqs) {
      EXPECT_LT(std::abs(e.eigenvalues[0].real() - e.eigenvalues[1].real()), 1e-10);
      EXPECT_NEAR(e.eigenvalues[0].real(),
                  lion::eigenvalue_real_part(e.location, {1.0, 0.426095, 3}), 1e-8);
    }
  }

  // (b) weak
  {
    const auto eqs = lion::find_equilibria_n3({1.0, 0.963047, 3});
    ASSERT_EQ(eqs.size(), 3u);
    EXPECT_TRUE(eqs[0].on_axis);
    EXPECT_EQ(eqs[0].classification, EqClass::sink);
    EXPECT_TRUE(eqs[1].on_axis);
    EXPECT_EQ(eqs[1].classification, EqClass::source);
    EXPECT_LT(eqs[0].location.w, eqs[1].location.w);
    EXPECT_FALSE(eqs[2].on_axis);
    EXPECT_EQ(eqs[2].classification, EqClass::sink);
  }

  // (c) the axis pair is born inside one 0.005 step around Lambda_c
  {
    double last_zero = -1.0, first_pair = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double lam = 0.8 + 0.005 * i;
      int axis = 0;
      for (const auto& e : lion::equilibrium_sweep({1.0, lam, 3}))
        if (e.on_axis) axis++;
      if (axis == 0) last_zero = lam;
      if (axis == 2 && first_pair < 0.0) first_pair = lam;
    }
    EXPECT_LT(last_zero, 0.85218915);
    EXPECT_GT(first_pair, 0.85218915);
    EXPECT_NEAR(first_pair - last_zero, 0.005, 1e-9);
  }
  EXPECT_LT(timer.seconds(), 10.0);
}

// The advertised sink counts follow the conjectured floor((N-1)/2). At the
// exact tangency coupling the flow for even N carries one additional weakly
// attracting focus (|Re| < 0.02, confirmed by direct eigenvalues and by
// simulation), so N=4 and N=6 honestly report one sink more than the
// conjecture; the count matches it deeper inside the super-weak regime. The
// assertions below state the advertised values and are expected to stay red
// for N=4 and N=6.
TEST(Acceptance, C08_SinkCountConjectureAtCriticallyWeak) {
  Reporter rep("8 sink counts at critically weak = floor((N-1)/2)");
  Stopwatch timer;
  const int conjectured[] = {1, 1, 2, 2};
  for (int n = 3; n <= 6; ++n) {
    lion::LionParams p{1.0, 0.5, n};
    p.lambda = lion::lambda_critical(p);
    const auto eqs = lion::equilibrium_sweep(p);
    const int sinks = lion::sink_count(eqs);
    EXPECT_EQ(sinks, conjectured[n - 3])
        << "N=" << n << " at lambda=Lambda_c(N)=" << p.lambda << ": the sweep finds "
        << sinks << " sinks; the extra one (even N) is a weakly attracting focus "
        << "with |Re lambda| < 0.02 that the conjectured count treats as neutral";
  }
  EXPECT_LT(timer.seconds(), 30.0);
}

TEST(Acceptance, C09_ConservationAndEquivariance) {
  Reporter rep("9 mean-frequency conservation and SO(3) equivariance");
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_state = [&](std::size_t n) {
    OscillatorState s;
    s.w.resize(n);
    s.x.resize(n);
    s.y.resize(n);
    s.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.w[i] = u(rng);
      s.x[i] = u(rng);
      s.y[i] = u(rng);
      s.z[i] = u(rng);
    }
    return s;
  };

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;
    ModelParams p;
    p.lambda = 0.1 + std::abs(u(rng)) * 1.4;
    p.omegas.resize(n);
    double omega_sum = 0.0;
    for (auto& om : p.omegas) {
      om = u(rng);
      omega_sum += om;
    }
    const OscillatorState s = random_state(n);
    const OscillatorState d = rhs_full(s, p);
    double wdot_sum = 0.0;
    for (double wd : d.w) wdot_sum += wd;
    ASSERT_NEAR(wdot_sum, omega_sum, 1e-10);
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    ModelParams p;
    p.lambda = 0.1 + std::abs(u(rng)) * 1.4;
    p.omegas.resize(n);
    for (auto& om : p.omegas) om = u(rng);
    const OscillatorState s = random_state(n);
    double ax = u(rng), ay = u(rng), az = u(rng);
    const double alen = std::sqrt(ax * ax + ay * ay + az * az) + 1e-12;
    ax /= alen;
    ay /= alen;
    az /= alen;
    const double th = u(rng) * kPi;
    const double c = std::cos(th), sn = std::sin(th), mc = 1 - c;
    const double R[3][3] = {
        {c + ax * ax * mc, ax * ay * mc - az * sn, ax * az * mc + ay * sn},
        {ay * ax * mc + az * sn, c + ay * ay * mc, ay * az * mc - ax * sn},
        {az * ax * mc - ay * sn, az * ay * mc + ax * sn, c + az * az * mc}};
    auto rotate = [&](const OscillatorState& in) {
      OscillatorState out = in;
      for (std::size_t i = 0; i < in.size(); ++i) {
        out.x[i] = R[0][0] * in.x[i] + R[0][1] * in.y[i] + R[0][2] * in.z[i];
        out.y[i] = R[1][0] * in.x[i] + R[1][1] * in.y[i] + R[1][2] * in.z[i];
        out.z[i] = R[2][0] * in.x[i] + R[2][1] * in.y[i] + R[2][2] * in.z[i];
      }
      return out;
    };
    const OscillatorState lhs = rhs_full(rotate(s), p);
    const OscillatorState rot_rhs = rotate(rhs_full(s, p));
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(lhs.w[i], rot_rhs.w[i], 1e-10);
      ASSERT_NEAR(lhs.x[i], rot_rhs.x[i], 1e-10);
      ASSERT_NEAR(lhs.y[i], rot_rhs.y[i], 1e-10);
      ASSERT_NEAR(lhs.z[i], rot_rhs.z[i], 1e-10);
    }
  }
}

TEST(Acceptance, C10_IntegratorOrderChecks) {
  Reporter rep("10 RK4 order ratio and adaptive tolerance scaling");
  auto harmonic = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  auto endpoint_error = [](const Trajectory& t) {
    const double du = t.states.back()[0] - 1.0;
    const double dv = t.states.back()[1] - 0.0;
    return std::sqrt(du * du + dv * dv);
  };

  IntegratorConfig cfg;
  cfg.method = Method::rk4_fixed;
  cfg.t_end = 2.0 * kPi;
  cfg.sample_dt = cfg.t_end;
  cfg.dt = 0.1;
  const double coarse = endpoint_error(integrate(harmonic, {1.0, 0.0}, cfg));
  cfg.dt = 0.05;
  const double fine = endpoint_error(integrate(harmonic, {1.0, 0.0}, cfg));
  const double ratio = coarse / fine;
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);

  IntegratorConfig ad;
  ad.t_end = 2.0 * kPi;
  ad.sample_dt = ad.t_end;
  ad.atol = 1e-14;
  ad.rtol = 1e-6;
  const double loose = endpoint_error(integrate(harmonic, {1.0, 0.0}, ad));
  ad.rtol = 1e-8;
  const double tight = endpoint_error(integrate(harmonic, {1.0, 0.0}, ad));
  EXPECT_GE(loose / tight, 10.0);
}

}  // namespace
}  // namespace quatsync
