#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qsir/continuum.hpp"

using namespace qsir;
using qsir::test::Scenario;

TEST(Rhs, FullDepletionInitial) {
  const auto r = continuum::rhs(Scenario::init(), Scenario::full_depletion());
  EXPECT_NEAR(r.dx, -0.072, 1e-16);
  EXPECT_NEAR(r.dy, 0.032, 1e-16);
  EXPECT_NEAR(r.dz, 0.04, 1e-16);
}

TEST(Rhs, VanishesWithoutInfected) {
  const auto r = continuum::rhs({0.7, 0.0, 0.3}, Scenario::full_depletion());
  EXPECT_EQ(r.dx, 0.0);
  EXPECT_EQ(r.dy, 0.0);
  EXPECT_EQ(r.dz, 0.0);
  const auto g = continuum::rhs({0.0, 0.0, 1.0}, Scenario::partial_depletion());
  EXPECT_EQ(g.dx, 0.0);
  EXPECT_EQ(g.dy, 0.0);
  EXPECT_EQ(g.dz, 0.0);
}

TEST(Rhs, ComponentsSumToZero) {
  test::CaseSampler gen(1);
  for (int i = 0; i < 1000; ++i) {
    const auto r = continuum::rhs(gen.state(), gen.params());
    const double scale = std::abs(r.dx) + std::abs(r.dz);
    ASSERT_LE(std::abs(r.dx + r.dy + r.dz), 2e-16 * scale);
  }
}

TEST(Rk4Step, FixedPointAndConservation) {
  const SirState s{0.6, 0.0, 0.4};
  EXPECT_EQ(continuum::rk4_step(s, 0.5, Scenario::full_depletion()), s);
  const SirState out = continuum::rk4_step(Scenario::init(), 0.01, Scenario::full_depletion());
  EXPECT_NEAR(total_population(out), 1.0, 1e-14);
  EXPECT_THROW(continuum::rk4_step(s, 0.0, Scenario::full_depletion()), ValidationError);
}

TEST(Rk4Step, LinearDecayWithoutInfection) {
  // b -> 0 is outside Params' domain; 1e-300 makes the incidence vanish
  // below double resolution and leaves y' = -c y.
  const Params p(1e-300, 0.1, 1.1, 0.01);
  SirState s{0.6, 0.4, 0.0};
  for (int k = 0; k < 100; ++k) s = continuum::rk4_step(s, 0.1, p);
  EXPECT_NEAR(s.y, 0.14715177646857692864, 1e-7);
}

TEST(Integrate, FullDepletionRegime) {
  const Trajectory t = continuum::integrate(Scenario::init(), {0.01, 100.0}, Scenario::full_depletion(), 0.0);
  EXPECT_EQ(t.back().t, 100.0);
  EXPECT_LT(t.back().state.y, 1e-2);
  EXPECT_GT(t.back().state.z, 0.98);
}

TEST(Integrate, PartialDepletionRegime) {
  const Trajectory t = continuum::integrate(Scenario::init(), {0.01, 100.0}, Scenario::partial_depletion(), 0.0);
  EXPECT_LT(t.back().state.y, 1e-6);
  EXPECT_GT(t.back().state.x, 0.1);
}

TEST(Integrate, ConstantWithoutInfected) {
  const SirState s{0.5, 0.0, 0.5};
  for (const auto& r : continuum::integrate(s, {0.1, 5.0}, Scenario::full_depletion(), 0.0).records) EXPECT_EQ(r.state, s);
}

TEST(Integrate, LastStepLandsOnEnd) {
  const Trajectory t = continuum::integrate(Scenario::init(), {0.3, 1.0}, Scenario::full_depletion(), 0.0);
  ASSERT_EQ(t.size(), 5u);  // 0, 0.3, 0.6, 0.9, 1.0
  EXPECT_EQ(t.back().t, 1.0);
  EXPECT_NEAR(t[3].t, 0.9, 1e-15);
}

TEST(Integrate, GuardsAndValidation) {
  EXPECT_THROW(continuum::integrate(Scenario::init(), {0.0, 1.0}, Scenario::full_depletion(), 0.0), ValidationError);
  EXPECT_THROW(continuum::integrate(Scenario::init(), {0.1, 0.0}, Scenario::full_depletion(), 0.0), ValidationError);
  EXPECT_THROW(continuum::integrate(Scenario::init(), {1e-6, 100.0}, Scenario::full_depletion(), 0.0), ValidationError);
}

TEST(Integrate, ConservationAndMonotonicity) {
  test::CaseSampler gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Params p = gen.params();
    const SirState s0 = gen.state();
    const double n0 = total_population(s0);
    const Trajectory t = continuum::integrate(s0, {0.05, 50.0}, p, 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
      ASSERT_LE(std::abs(total_population(t[k].state) - n0), 1e-12 * n0);
      ASSERT_LE(t[k].state.x, t[k - 1].state.x);
      ASSERT_GE(t[k].state.z, t[k - 1].state.z);
    }
  }
}

TEST(Integrate, ClampsUndershootAndCounts) {
  // A huge step on a fast removal rate drives y negative in one RK4 step.
  const Params p(0.3, 50.0, 1.1, 0.01);
  continuum::IntegrationStats stats;
  const Trajectory t = continuum::integrate(Scenario::init(), {0.5, 1.0}, p, 0.0, &stats);
  EXPECT_GT(stats.clamped, 0u);
  for (const auto& r : t.records) EXPECT_TRUE(r.state.nonnegative());
}

TEST(SampleAt, HitsRequestedTimes) {
  const std::vector<double> times{0.01, 0.011, 0.0121, 0.5, 2.0};
  const Trajectory t = continuum::sample_at(Scenario::init(), Scenario::full_depletion(), 0.01, times, 0.01);
  ASSERT_EQ(t.size(), times.size());
  for (std::size_t k = 0; k < times.size(); ++k) EXPECT_EQ(t[k].t, times[k]);
  EXPECT_EQ(t[0].state, Scenario::init());
  const Trajectory u = continuum::integrate(Scenario::init(), {0.01, 2.0}, Scenario::full_depletion(), 0.01);
  EXPECT_LE(max_abs_difference(t.back().state, u.back().state), 1e-9);
}

// Halving dt cuts the error against a fine reference by about 16.
TEST(Integrate, FourthOrder) {
  auto at10 = [](double dt) { return continuum::integrate(Scenario::init(), {dt, 10.0}, Scenario::full_depletion(), 0.0).back().state; };
  const SirState ref = at10(0.04 / 16);
  const double e1 = max_abs_difference(at10(0.04), ref);
  const double e2 = max_abs_difference(at10(0.02), ref);
  EXPECT_GT(std::log2(e1 / e2), 3.8);
  EXPECT_LT(std::log2(e1 / e2), 4.3);
}
