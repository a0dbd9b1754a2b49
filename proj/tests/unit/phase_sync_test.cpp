#include "synclab/error.hpp"
#include "synclab/limit_cycle.hpp"
#include "synclab/models.hpp"
#include "synclab/phase_sync.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace synclab {
namespace {

constexpr double kPi = std::numbers::pi;

StateVec vec(std::initializer_list<double> v) {
  StateVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const LimitCycle& fhn() {
  static const LimitCycle c =
      find_limit_cycle(models::fhn(), vec({5.0, -5.0}), 10.0).anchored_near(vec({-0.7481, 1.5164})).first;
  return c;
}

const LimitCycle& circle() {
  static const LimitCycle c = find_limit_cycle(models::hopf_normal_form(), vec({0.5, 0.0}), 6.0);
  return c;
}

double cyclic(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

TEST(DistanceIntegral, IdenticalCyclesAtZeroShift) {
  EXPECT_NEAR(distance_integral(fhn(), fhn(), 0.0), 0.0, 1e-6);
}

TEST(DistanceIntegral, CircleClosedForm) {
  const double T = circle().period();
  for (double s : {0.1, 0.7, 1.9, 3.1, 4.4, 6.0}) {
    EXPECT_NEAR(distance_integral(circle(), circle(), s), 2.0 * T * (1.0 - std::cos(2.0 * kPi * s / T)), 1e-6)
        << "s = " << s;
  }
}

TEST(DistanceIntegral, MatchesIndependentQuadrature) {
  const LimitCycle& c = fhn();
  const double s = 2.3;
  const double oracle =
      testing::simpson([&](double tau) { return (c.state_at(tau + s) - c.state_at(tau)).squaredNorm(); }, 0.0,
                       c.period(), 8000);
  EXPECT_NEAR(distance_integral(c, c, s), oracle, 1e-6 * std::max(1.0, oracle));
}

TEST(DistanceIntegral, PeriodMismatch) {
  const LimitCycle vdp = find_limit_cycle(models::van_der_pol(1.0), vec({2.0, 0.0}), 6.6);
  try {
    (void)distance_integral(fhn(), vdp, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PeriodMismatch);
  }
}

TEST(ThetaStarTest, IdenticalCycles) {
  const ThetaStar ts = theta_star(fhn(), fhn());
  EXPECT_LT(cyclic(ts.theta0, 0.0, fhn().period()), 1e-6);
  EXPECT_NEAR(ts.dmin, 0.0, 1e-9);
}

TEST(ThetaStarTest, QuarterShiftMatchesBruteForceScan) {
  const LimitCycle& master = fhn();
  const double T = master.period();
  const LimitCycle slave = master.shifted(T / 4.0);
  // Brute-force scan with an independent quadrature.
  double best_s = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2000; ++k) {
    const double s = T * k / 2000.0;
    const double d = testing::simpson(
        [&](double tau) { return (master.state_at(tau + s + T / 4.0) - master.state_at(tau)).squaredNorm(); }, 0.0,
        T, 400);
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  const ThetaStar ts = theta_star(slave, master);
  EXPECT_LT(cyclic(ts.theta0, best_s, T), T / 2000.0 + 1e-9);
  EXPECT_LT(cyclic(ts.theta0, 0.75 * T, T), 1e-6);
  EXPECT_NEAR(ts.dmin, 0.0, 1e-8);
}

TEST(ThetaStarTest, ShiftedCircle) {
  const double T = circle().period();
  const LimitCycle slave = circle().shifted(1.0);
  const ThetaStar ts = theta_star(slave, circle());
  EXPECT_LT(cyclic(ts.theta0, T - 1.0, T), 1e-6);
}

TEST(MalkinF, ZeroDetuning) {
  const MalkinProfile p = malkin_F(fhn(), fhn(), 0.0);
  EXPECT_NEAR(distance_integral(fhn(), fhn(), p.theta0) - p.dmin, 0.0, 1e-9);
  for (double v : p.values) EXPECT_GE(v, -1e-9);
}

TEST(MalkinF, PeriodicEndpoints) {
  for (double delta : {0.0, 0.05, 0.2}) {
    const MalkinProfile p = malkin_F(fhn(), fhn(), delta);
    double peak = 0.0;
    for (double v : p.values) peak = std::max(peak, std::abs(v));
    EXPECT_LE(std::abs(p.values.front() - p.values.back()), 1e-6 * peak);
    EXPECT_NEAR(p.theta.back() - p.theta.front(), p.period, 1e-12);
  }
}

TEST(MalkinF, SmallDetuningHasTwoRootsNearTheta0) {
  const MalkinProfile p = malkin_F(fhn(), fhn(), 0.05);
  ASSERT_EQ(p.roots.size(), 2u);
  EXPECT_NE(p.roots[0].slope > 0.0, p.roots[1].slope > 0.0);
  const auto root = p.increasing_root();
  ASSERT_TRUE(root.has_value());
  EXPECT_GT(root->slope, 0.0);
  EXPECT_LT(p.phase_distance(root->theta, p.theta0), 0.1 * p.period);
}

TEST(MalkinF, CircleRootsMatchClosedForm) {
  const double T = circle().period();
  for (double delta : {0.05, 0.5, 1.5}) {
    const MalkinProfile p = malkin_F(circle(), circle(), delta);
    const double r = T / (2.0 * kPi) * std::acos(1.0 - delta / 2.0);
    ASSERT_EQ(p.roots.size(), 2u);
    const auto root = p.increasing_root();
    ASSERT_TRUE(root.has_value());
    EXPECT_NEAR(root->theta, r, 1e-7);
    EXPECT_NEAR(root->slope, 4.0 * kPi * std::sin(2.0 * kPi * r / T), 1e-4);
    for (const auto& q : p.roots) {
      EXPECT_TRUE(std::abs(q.theta - r) < 1e-7 || std::abs(q.theta - (T - r)) < 1e-7) << q.theta;
    }
  }
}

TEST(MalkinF, RootApproachesTheta0MonotonicallyAsDetuningShrinks) {
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {0.2, 0.1, 0.05, 0.025}) {
    const MalkinProfile p = malkin_F(fhn(), fhn(), delta);
    const auto root = p.increasing_root();
    ASSERT_TRUE(root.has_value()) << delta;
    const double gap = p.phase_distance(root->theta, p.theta0);
    EXPECT_LT(gap, previous) << delta;
    previous = gap;
  }
}

TEST(MalkinF, NegativeDetuningRejected) {
  EXPECT_THROW((void)malkin_F(fhn(), fhn(), -0.1), Error);
}

TEST(CoupledPhaseRhs, ExampleOneIsVerbatim) {
  const PhaseCoupling pc(fhn(), fhn(), 0.01, 0.05);
  EXPECT_NEAR(pc.dmin(), 0.0, 1e-9);
  for (double t : {0.0, 1.3, 7.7, 25.0}) {
    const StateVec x = vec({0.3 * t - 1.0, 1.0 - 0.1 * t});
    const StateVec y = fhn().state_at(t);
    const double x1 = x[0];
    const double x2 = x[1];
    const StateVec f = vec({2.0 * (x1 - x1 * x1 * x1 / 3.0 + x2 - 9.0 / 20.0), -(x1 + 0.8 * x2 - 0.7) / 2.0});
    const StateVec expected = (1.0 + 0.01 * ((x - y).squaredNorm() - 0.05)) * f;
    EXPECT_LT((coupled_phase_rhs(pc, t, x) - expected).norm(), 1e-9 * (1.0 + expected.norm()));
  }
}

TEST(CoupledPhaseRhs, OnMasterAtMatchedPhase) {
  const PhaseCoupling pc(fhn(), fhn(), 0.2, 0.05);
  for (double t : {0.0, 2.0, 5.5}) {
    const StateVec x = fhn().state_at(t);
    const StateVec expected = (1.0 - 0.2 * 0.05) * models::fhn()(t, x);
    EXPECT_LT((coupled_phase_rhs(pc, t, x) - expected).norm(), 1e-8);
  }
}

TEST(CoupledPhaseRhs, ZeroCouplingIsBitIdentical) {
  const PhaseCoupling pc(fhn(), fhn(), 0.0, 0.05);
  const VectorField f = models::fhn();
  for (double t : {0.0, 0.3, 11.0}) {
    const StateVec x = vec({t - 2.0, 0.5 * t});
    const StateVec a = coupled_phase_rhs(pc, t, x);
    const StateVec b = f(t, x);
    EXPECT_EQ(a[0], b[0]);
    EXPECT_EQ(a[1], b[1]);
  }
}

TEST(CoupledPhaseRhs, InvalidParameters) {
  EXPECT_THROW(PhaseCoupling(fhn(), fhn(), -0.01, 0.05), Error);
  EXPECT_THROW(PhaseCoupling(fhn(), fhn(), 0.01, -0.05), Error);
}

TEST(SimulatePhaseSync, AlignedStartStaysAligned) {
  const PhaseCoupling pc(fhn(), fhn(), 0.01, 0.05);
  const PhaseSyncRun run = simulate_phase_sync(pc, fhn().anchor(), 5);
  for (double lag : run.lags) EXPECT_LT(std::abs(lag), 0.05 * fhn().period());
  EXPECT_LT(*run.report.scalar("prop_residual"), 0.5);
}

TEST(SimulatePhaseSync, CouplingShrinksTheLag) {
  const PhaseCoupling pc(fhn(), fhn(), 0.01, 0.05);
  const PhaseSyncRun coupled = simulate_phase_sync(pc, vec({5.0, -5.0}), 12);
  const PhaseSyncRun free = simulate_phase_sync(pc.with_epsilon(0.0), vec({5.0, -5.0}), 12);
  ASSERT_EQ(coupled.lags.size(), 12u);
  EXPECT_LT(std::abs(coupled.lags.back()), std::abs(coupled.lags[1]));
  EXPECT_NEAR(free.lags.back() / free.lags[1], 1.0, 0.05);
  EXPECT_EQ(coupled.report.series.at("phase_lag").size(), 12u);
}

// The slave runs at 1 - eps*delta on the cycle, so it settles behind the
// master: x(t) ~ x0(t - theta_delta) with theta_delta the root where F' > 0.
// Read as a lead (x0(t + theta)), the same phase is the root where F' < 0.
TEST(SimulatePhaseSync, SettlesOnMalkinRoot) {
  const PhaseCoupling pc(fhn(), fhn(), 0.01, 0.05);
  const PhaseSyncRun run = simulate_phase_sync(pc, vec({5.0, -5.0}), 300);
  const MalkinProfile profile = malkin_F(fhn(), fhn(), 0.05);
  const auto root = profile.increasing_root();
  ASSERT_TRUE(root.has_value());
  const double lead = run.lags.back();
  EXPECT_LT(lead, 0.0);
  EXPECT_LT(profile.phase_distance(-lead, root->theta), 0.01);
  for (const auto& r : profile.roots) {
    if (profile.phase_distance(lead, r.theta) < 0.01) EXPECT_LT(r.slope, 0.0);
  }
  EXPECT_NEAR(*run.report.scalar("prop_residual"), fhn().period() * 0.05, 0.01);
  EXPECT_LT(*run.report.scalar("prop_residual"), 0.5);
}

}  // namespace
}  // namespace synclab
