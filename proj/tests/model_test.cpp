#include "quatsync/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "quatsync/two_oscillator.hpp"

namespace quatsync {
namespace {

OscillatorState random_state(std::mt19937& rng, std::size_t n, double amp = 2.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
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
}

TEST(PairwiseV, IdenticalOscillatorsGiveZero) {
  OscillatorState s;
  s.w = {0.1, 0.1, 0.1};
  s.x = {1.0, 1.0, 1.0};
  s.y = {2.0, 2.0, 2.0};
  s.z = {-1.0, -1.0, -1.0};
  const PairwiseDistances d = pairwise_v(s);
  for (double v : d.v) EXPECT_EQ(v, 0.0);
}

TEST(PairwiseV, TwoOscillatorDistance) {
  OscillatorState s;
  s.w = {0.0, 0.0};
  s.x = {1.0, 0.0};
  s.y = {1.05, 0.0};
  s.z = {0.0, 0.0};
  const PairwiseDistances d = pairwise_v(s);
  EXPECT_NEAR(d(0, 1), std::sqrt(2.1025), 1e-15);
  EXPECT_NEAR(d(0, 1), 1.45, 1e-12);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_EQ(d(0, 1), d(1, 0));
}

TEST(PairwiseV, ArithmeticProgressionDoubles) {
  OscillatorState s;
  s.w = {0.0, 0.0, 0.0};
  s.x = {0.4, 0.1, -0.2};
  s.y = {1.0, 0.6, 0.2};
  s.z = {-0.3, 0.0, 0.3};
  const PairwiseDistances d = pairwise_v(s);
  EXPECT_NEAR(d(0, 2), 2.0 * d(0, 1), 1e-14);
  EXPECT_NEAR(d(0, 1), d(1, 2), 1e-14);
}

TEST(RhsFull, FixedPointWhenIdentical) {
  ModelParams p;
  p.omegas = {0.0, 0.0, 0.0};
  p.lambda = 1.3;
  OscillatorState s;
  s.w = {0.7, 0.7, 0.7};
  s.x = {0.2, 0.2, 0.2};
  s.y = {0.0, 0.0, 0.0};
  s.z = {-0.5, -0.5, -0.5};
  const OscillatorState d = rhs_full(s, p);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(d.w[i], 0.0);
    EXPECT_EQ(d.x[i], 0.0);
    EXPECT_EQ(d.y[i], 0.0);
    EXPECT_EQ(d.z[i], 0.0);
  }
}

// With all imaginary parts equal across oscillators the flow restricts to the
// classical model dw_n = omega_n + (lambda/N) sum sin(w_m - w_n).
TEST(RhsFull, ReducesToClassicalOnRealSlice) {
  ModelParams p;
  p.omegas = {0.4, -0.4};
  p.lambda = 1.7;
  OscillatorState s;
  s.w = {1.1, 0.2};
  s.x = {0.9, 0.9};
  s.y = {-0.3, -0.3};
  s.z = {0.0, 0.0};
  const OscillatorState d = rhs_full(s, p);
  const double expected0 = 0.4 + (1.7 / 2.0) * std::sin(s.w[1] - s.w[0]);
  const double expected1 = -0.4 + (1.7 / 2.0) * std::sin(s.w[0] - s.w[1]);
  EXPECT_NEAR(d.w[0], expected0, 1e-15);
  EXPECT_NEAR(d.w[1], expected1, 1e-15);
  EXPECT_EQ(d.x[0], 0.0);
  EXPECT_EQ(d.y[1], 0.0);
}

// The two-oscillator difference dynamics must agree with the planar system.
TEST(RhsFull, MatchesPlanarReduction) {
  ModelParams p;
  p.omegas = {1.0, -1.0};
  p.lambda = 1.0;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double wdiff = u(rng) * 2.0;
    const double v = std::abs(u(rng)) * 2.0 + 1e-3;
    OscillatorState s;
    s.w = {wdiff / 2, -wdiff / 2};
    s.x = {v / 2, -v / 2};
    s.y = {0.3, 0.3};  // common offsets cancel in the difference
    s.z = {-0.1, -0.1};
    const OscillatorState d = rhs_full(s, p);
    const auto planar = two_osc::rhs({wdiff, v}, 2.0, 1.0);
    EXPECT_NEAR(d.w[0] - d.w[1], planar.w, 1e-13);
    EXPECT_NEAR(d.x[0] - d.x[1], planar.v, 1e-13);
  }
}

TEST(RhsFull, BlowUpGuard) {
  ModelParams p;
  p.omegas = {0.0, 0.0};
  p.lambda = 1.0;
  OscillatorState s;
  s.w = {0.0, 0.0};
  s.x = {31.0, 0.0};
  s.y = {0.0, 0.0};
  s.z = {0.0, 0.0};
  EXPECT_THROW(rhs_full(s, p), BlowUpError);
}

TEST(RhsFull, MeanFrequencyConservation) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;
    ModelParams p;
    p.lambda = 0.1 + std::abs(u(rng)) * 2.0;
    p.omegas.resize(n);
    double omega_sum = 0.0;
    for (auto& om : p.omegas) {
      om = u(rng);
      omega_sum += om;
    }
    const OscillatorState s = random_state(rng, n);
    const OscillatorState d = rhs_full(s, p);
    double wdot_sum = 0.0;
    for (double wd : d.w) wdot_sum += wd;
    EXPECT_NEAR(wdot_sum, omega_sum, 1e-10);
  }
}

TEST(RhsFull, SO3Equivariance) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    ModelParams p;
    p.lambda = 0.1 + std::abs(u(rng)) * 1.4;
    p.omegas.resize(n);
    for (auto& om : p.omegas) om = u(rng);
    const OscillatorState s = random_state(rng, n, 1.0);

    // Rodrigues rotation from a random axis-angle
    double ax = u(rng), ay = u(rng), az = u(rng);
    const double alen = std::sqrt(ax * ax + ay * ay + az * az) + 1e-12;
    ax /= alen;
    ay /= alen;
    az /= alen;
    const double th = u(rng) * std::numbers::pi;
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
    const OscillatorState rhs_rot = rotate(rhs_full(s, p));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(lhs.w[i], rhs_rot.w[i], 1e-10);
      EXPECT_NEAR(lhs.x[i], rhs_rot.x[i], 1e-10);
      EXPECT_NEAR(lhs.y[i], rhs_rot.y[i], 1e-10);
      EXPECT_NEAR(lhs.z[i], rhs_rot.z[i], 1e-10);
    }
  }
}

TEST(RhsFull, TranslationInvarianceInW) {
  std::mt19937 rng(17);
  ModelParams p;
  p.omegas = {0.2, -0.5, 0.3};
  p.lambda = 0.8;
  const OscillatorState s = random_state(rng, 3);
  OscillatorState shifted = s;
  for (auto& w : shifted.w) w += 1.234;
  const OscillatorState d0 = rhs_full(s, p);
  const OscillatorState d1 = rhs_full(shifted, p);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(d0.w[i], d1.w[i], 1e-12);
    EXPECT_NEAR(d0.x[i], d1.x[i], 1e-12);
    EXPECT_NEAR(d0.y[i], d1.y[i], 1e-12);
    EXPECT_NEAR(d0.z[i], d1.z[i], 1e-12);
  }
}

TEST(RotatingFrame, ShiftsToZeroMean) {
  ModelParams p;
  p.omegas = {1.0, 1.0};
  const ModelParams q = to_rotating_frame(p);
  EXPECT_DOUBLE_EQ(q.omegas[0], 0.0);
  EXPECT_DOUBLE_EQ(q.omegas[1], 0.0);

  ModelParams r;
  r.omegas = {3.0, -1.0};
  const ModelParams rr = to_rotating_frame(r);
  EXPECT_DOUBLE_EQ(rr.omegas[0], 2.0);
  EXPECT_DOUBLE_EQ(rr.omegas[1], -2.0);

  ModelParams ref;
  ref.omegas = {0.66, 0.10, -0.29, -0.34, -0.12};  // sums to 0.01
  const ModelParams shifted = to_rotating_frame(ref);
  double sum = 0.0;
  for (double om : shifted.omegas) sum += om;
  EXPECT_NEAR(sum, 0.0, 1e-12);
  EXPECT_NEAR(shifted.omegas[0], 0.66 - 0.002, 1e-15);
}

TEST(CriticalCoupling, MaxPairwiseGap) {
  ModelParams p;
  p.omegas = {0.66, 0.10, -0.29, -0.34, -0.12};
  EXPECT_NEAR(critical_coupling(p), 1.0, 1e-15);
  p.omegas = {0.5, 0.5, 0.5};
  EXPECT_EQ(critical_coupling(p), 0.0);
  p.omegas = {1.0, 0.0, -1.0};
  EXPECT_EQ(critical_coupling(p), 2.0);
}

TEST(OscillatorState, FlatRoundTrip) {
  std::mt19937 rng(3);
  const OscillatorState s = random_state(rng, 4);
  const OscillatorState back = OscillatorState::from_flat(s.to_flat());
  EXPECT_EQ(back.w, s.w);
  EXPECT_EQ(back.x, s.x);
  EXPECT_EQ(back.y, s.y);
  EXPECT_EQ(back.z, s.z);
}

}  // namespace
}  // namespace quatsync
