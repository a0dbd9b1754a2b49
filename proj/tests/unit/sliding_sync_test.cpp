#include "synclab/error.hpp"
#include "synclab/models.hpp"
#include "synclab/sliding_sync.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace synclab {
namespace {

StateVec vec(std::initializer_list<double> v) {
  StateVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Reference example2_reference() {
  return Reference(models::forced_master_nn(), models::master_orbit, 0.0, 100.0);
}

Box cube(double half) { return Box{StateVec::Constant(3, -half), StateVec::Constant(3, half)}; }

VectorField zero_field(std::size_t n) {
  return VectorField(n, [n](double, const StateVec&) { return StateVec(StateVec::Zero(static_cast<Eigen::Index>(n))); });
}

TEST(StaticFeedbackTest, GainsMustBeNegative) {
  EXPECT_THROW(StaticFeedback({-1.0, 0.0, -1.0}), Error);
  EXPECT_THROW(StaticFeedback({-1.0, 2.0}), Error);
  EXPECT_NO_THROW(StaticFeedback({-1e-9}));
}

TEST(Lyapunov, L1Norm) { EXPECT_DOUBLE_EQ(lyapunov_l1(vec({-2.0, 1.0, 2.0})), 5.0); }

TEST(CoupledStaticRhs, OnReferenceReducesToSlave) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-3.5, -3.5, -3.5});
  const VectorField slave = models::chaotic_cnn();
  for (double t : {0.0, 1.0, 4.5}) {
    const StateVec y = ref.state(t);
    EXPECT_EQ(coupled_static_rhs(fb, slave, ref, t, y), slave(t, y));
  }
}

TEST(CoupledStaticRhs, ExampleTwoInitialCoupling) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-3.5, -3.5, -3.5});
  const VectorField slave = models::chaotic_cnn();
  const StateVec x = vec({-1.0, 1.0, 1.0});
  const StateVec coupling = coupled_static_rhs(fb, slave, ref, 0.0, x) - slave(0.0, x);
  EXPECT_LT((coupling - vec({3.5, -3.5, -3.5})).norm(), 1e-15);
}

TEST(CoupledStaticRhs, VanishingGainRecoversSlave) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-1e-14, -1e-14, -1e-14});
  const StateVec x = vec({0.2, -0.4, 1.5});
  EXPECT_LT((coupled_static_rhs(fb, models::chaotic_cnn(), ref, 0.7, x) - models::chaotic_cnn()(0.7, x)).norm(),
            1e-13);
}

TEST(SwitchLogTest, CountsAndRates) {
  SwitchLog log;
  log.times = {{0.1, 0.2, 0.9}, {}};
  EXPECT_EQ(log.count(0, 0.0, 0.5), 2u);
  EXPECT_EQ(log.count(0, 0.5, 1.0), 1u);
  EXPECT_EQ(log.count(1, 0.0, 1.0), 0u);
  const auto rate = chattering_rate(log, 0.0, 0.5);
  EXPECT_DOUBLE_EQ(rate[0], 4.0);
  EXPECT_DOUBLE_EQ(rate[1], 0.0);
}

TEST(SimulateStatic, StartOnReferenceStaysThere) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-20.0, -20.0, -20.0}, SlidingMode::FilippovSliding);
  const StaticRun run = simulate_static(fb, models::chaotic_cnn(), ref, ref.state(0.0), 3.0);
  for (double v : run.lyapunov) EXPECT_LE(v, 1e-12);
  ASSERT_TRUE(run.hitting_time.has_value());
  EXPECT_EQ(*run.hitting_time, 0.0);
}

TEST(SimulateStatic, FilippovHoldsSurfaceAfterHit) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-25.0, -25.0, -25.0}, SlidingMode::FilippovSliding);
  StaticSimOptions opts;
  opts.box = cube(2.0);
  const StaticRun run = simulate_static(fb, models::chaotic_cnn(), ref, vec({-1.0, 1.0, 1.0}), 4.0, opts);
  ASSERT_TRUE(run.hitting_time.has_value());
  EXPECT_LE(*run.report.scalar("post_hit_max_error"), 1e-6);
  EXPECT_EQ(*run.report.scalar("post_hit_switches"), 0.0);
  for (std::size_t k = 1; k < run.lyapunov.size(); ++k) {
    EXPECT_LE(run.lyapunov[k], run.lyapunov[k - 1] + 1e-6) << "step " << k;
  }
  const auto post = chattering_rate(run.switches, *run.hitting_time, 4.0);
  for (double r : post) EXPECT_EQ(r, 0.0);
}

TEST(SimulateStatic, RawAndFilippovAgreeBeforeContact) {
  const Reference ref = example2_reference();
  const double h = 1e-4;
  StaticSimOptions opts;
  opts.step = h;
  const StateVec x0 = vec({-1.0, 1.0, 1.0});
  const StaticRun raw =
      simulate_static(StaticFeedback({-25.0, -25.0, -25.0}, SlidingMode::Raw), models::chaotic_cnn(), ref, x0, 0.2, opts);
  const StaticRun fil = simulate_static(StaticFeedback({-25.0, -25.0, -25.0}, SlidingMode::FilippovSliding),
                                        models::chaotic_cnn(), ref, x0, 0.2, opts);
  double contact = 0.2;
  for (const auto& hit : fil.component_hits) {
    if (hit) contact = std::min(contact, *hit);
  }
  ASSERT_GT(contact, 10 * h);
  const double t_cmp = contact - 2 * h;
  EXPECT_LT((raw.trajectory.at(t_cmp) - fil.trajectory.at(t_cmp)).lpNorm<Eigen::Infinity>(), 10 * h);
}

TEST(SimulateStatic, RawModeChattersAfterHit) {
  const Reference ref = example2_reference();
  const StaticRun run = simulate_static(StaticFeedback({-3.5, -3.5, -3.5}, SlidingMode::Raw), models::chaotic_cnn(),
                                        ref, vec({-1.0, 1.0, 1.0}), 8.0);
  ASSERT_TRUE(run.hitting_time.has_value());
  const auto& pre = run.report.series.at("switch_rate_pre_hit");
  const auto& post = run.report.series.at("switch_rate_post_hit");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(pre[i], 5.0);
    EXPECT_GT(post[i], 100.0);
  }
  // One switch every few steps, well below the 1/(2h) ceiling.
  EXPECT_LT(*std::max_element(post.begin(), post.end()), 0.5 / 1e-4);
}

TEST(SimulateStatic, LeavingTheInflatedBoxIsReported) {
  const VectorField unstable(1, [](double, const StateVec& x) { return StateVec(x); });
  const Reference ref(zero_field(1), [](double) { return StateVec(StateVec::Zero(1)); }, 0.0, 50.0);
  StaticSimOptions opts;
  opts.box = Box{vec({0.9}), vec({1.1})};
  opts.step = 1e-3;
  try {
    (void)simulate_static(StaticFeedback({-0.1}), unstable, ref, vec({1.0}), 20.0, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainExceeded);
  }
}

TEST(CertifyGains, DriftFreeFields) {
  const Reference ref(zero_field(2), [](double) { return StateVec(StateVec::Zero(2)); }, 0.0, 10.0);
  const StaticFeedback fb({-2.0, -0.5});
  const Box box{vec({-1.0, -1.0}), vec({1.0, 1.0})};
  const GainCertificate cert = certify_gains(fb, zero_field(2), ref, box);
  EXPECT_EQ(cert.m_bound, 0.0);
  EXPECT_EQ(cert.mu, -0.5);
  EXPECT_TRUE(cert.valid);
  EXPECT_DOUBLE_EQ(cert.hit_bound(vec({0.5, -0.25}), vec({0.0, 0.0})), 0.75 / 0.5);
  EXPECT_DOUBLE_EQ(cert.t_hit_bound, 2.0 / 0.5);

  const StaticRun run = simulate_static(StaticFeedback({-2.0, -0.5}, SlidingMode::FilippovSliding), zero_field(2),
                                        ref, vec({0.5, -0.25}), 3.0);
  ASSERT_TRUE(run.hitting_time.has_value());
  EXPECT_LE(*run.hitting_time, cert.hit_bound(vec({0.5, -0.25}), vec({0.0, 0.0})));
  EXPECT_NEAR(*run.hitting_time, 0.5 - 1e-3 / 0.5, 1e-3);
  ASSERT_TRUE(run.contact_time.has_value());
  EXPECT_NEAR(*run.contact_time, 0.5, 1e-3);
}

TEST(CertifyGains, ScalarBoundedMismatch) {
  // phi = sin x, psi = cos t, y0 = sin t: |phi - psi| <= 2.
  const VectorField slave(1, [](double, const StateVec& x) { return StateVec(x.array().sin().matrix()); });
  const VectorField master(1, [](double t, const StateVec&) { return StateVec(StateVec::Constant(1, std::cos(t))); });
  const Reference ref(master, [](double t) { return StateVec(StateVec::Constant(1, std::sin(t))); }, 0.0, 20.0);
  const StaticFeedback fb({-3.5}, SlidingMode::FilippovSliding);
  const GainCertificate cert = certify_gains(fb, slave, ref, Box{vec({-2.0}), vec({2.0})});
  EXPECT_LE(cert.m_bound, 2.0 * 1.25);
  EXPECT_TRUE(cert.valid);
  EXPECT_LE(cert.mu, -1.0);
  const StateVec x0 = vec({1.8});
  const double bound = cert.hit_bound(x0, ref.state(0.0));
  EXPECT_LE(bound, 1.8 / 1.0);
  const StaticRun run = simulate_static(fb, slave, ref, x0, 5.0);
  ASSERT_TRUE(run.hitting_time.has_value());
  EXPECT_LE(*run.hitting_time, bound);
  EXPECT_LE(*run.report.scalar("post_hit_max_error"), 1e-6);
}

TEST(CertifyGains, ExampleTwoGainsAreTooSmall) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-3.5, -3.5, -3.5});
  const GainCertificate cert = certify_gains(fb, models::chaotic_cnn(), ref, cube(2.0));
  EXPECT_FALSE(cert.valid);
  EXPECT_GE(cert.mu, 0.0);
  try {
    require_valid_gains(cert);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GainTooSmall);
  }
  EXPECT_THROW((void)cert.hit_bound(vec({-1.0, 1.0, 1.0}), ref.state(0.0)), Error);
}

TEST(CertifyGains, DeterministicForFixedSeed) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-20.0, -20.0, -20.0});
  const GainCertificate a = certify_gains(fb, models::chaotic_cnn(), ref, cube(2.0));
  const GainCertificate b = certify_gains(fb, models::chaotic_cnn(), ref, cube(2.0));
  EXPECT_EQ(a.m_bound, b.m_bound);
  EXPECT_EQ(a.samples, 10000u);
}

TEST(CertifyGains, RandomStartsHitWithinBound) {
  const Reference ref = example2_reference();
  const StaticFeedback fb({-20.0, -20.0, -20.0}, SlidingMode::FilippovSliding);
  const GainCertificate cert = certify_gains(fb, models::chaotic_cnn(), ref, cube(2.0));
  ASSERT_TRUE(cert.valid);
  StaticSimOptions opts;
  opts.box = cube(2.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVec x0 = vec({u(rng), u(rng), u(rng)});
    const double bound = cert.hit_bound(x0, ref.state(0.0));
    const StaticRun run = simulate_static(fb, models::chaotic_cnn(), ref, x0, bound + 0.1, opts);
    ASSERT_TRUE(run.hitting_time.has_value()) << "trial " << trial;
    ASSERT_TRUE(run.contact_time.has_value()) << "trial " << trial;
    EXPECT_LE(*run.hitting_time, bound) << "trial " << trial;
    EXPECT_LE(*run.contact_time, bound) << "trial " << trial;
    EXPECT_LE(*run.report.scalar("post_hit_max_error"), 1e-6) << "trial " << trial;
  }
}

TEST(CertifyGains, BoundedDisturbanceWithInflatedBound) {
  const Reference ref = example2_reference();
  CertifyOptions copts;
  copts.extra_bound = 0.2;
  const StaticFeedback fb({-20.0, -20.0, -20.0}, SlidingMode::FilippovSliding);
  const GainCertificate cert = certify_gains(fb, models::chaotic_cnn(), ref, cube(2.0), copts);
  ASSERT_TRUE(cert.valid);
  StaticSimOptions opts;
  opts.box = cube(2.0);
  opts.disturbance = [](double t, const StateVec&) { return StateVec(StateVec::Constant(3, 0.2 * std::sin(5.0 * t))); };
  const StateVec x0 = vec({-1.0, 1.0, 1.0});
  const StaticRun run = simulate_static(fb, models::chaotic_cnn(), ref, x0, 3.0, opts);
  ASSERT_TRUE(run.hitting_time.has_value());
  EXPECT_LE(*run.hitting_time, cert.hit_bound(x0, ref.state(0.0)));
  EXPECT_LE(*run.report.scalar("post_hit_max_error"), 1e-6);
}

}  // namespace
}  // namespace synclab
