#include <cmath>

#include <gtest/gtest.h>

#include "configs.hpp"
#include "generators.hpp"
#include "imdyn/analysis.hpp"
#include "imdyn/errors.hpp"

namespace imdyn {
namespace {

using testing::figure1;
using testing::figure3;

Vector v1(double a) { return Vector::Constant(1, a); }

TEST(Energy, FigureConfigAtStart) {
  EXPECT_DOUBLE_EQ(energy(figure1(4.0), 1.0, v1(10.0), v1(0.0), 8.0), 3313.75);
}

TEST(Energy, VanishesAtMinimizerAtRest) {
  const SystemConfig cfg = figure1(4.0);
  for (double c : {0.0, 3.0, 8.0}) EXPECT_EQ(energy(cfg, 2.0, v1(0.0), v1(0.0), c), 0.0);
}

TEST(Energy, RejectsCOutsideRange) {
  const SystemConfig cfg = figure1(4.0);
  EXPECT_THROW(energy(cfg, 1.0, v1(1.0), v1(0.0), -0.1), InvalidInput);
  EXPECT_THROW(energy(cfg, 1.0, v1(1.0), v1(0.0), 8.01), InvalidInput);
}

// Term-by-term evaluation with the closed-form soft threshold.
TEST(Energy, MatchesHandEvaluation) {
  testing::Gen g(61);
  const SystemConfig cfg = figure1(2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = g.log_uniform(1.0, 100.0);
    const double x = g.uniform(-20.0, 20.0);
    const double v = g.uniform(-20.0, 20.0);
    const double c = g.uniform(0.0, 8.0);
    const double lambda = t;  // lambda0 = 1, l = 1
    const double p = std::abs(x) > lambda ? x - std::copysign(lambda, x) : 0.0;
    const double gap = std::abs(p) + (x - p) * (x - p) / (2.0 * lambda);
    const double grad = (x - p) / lambda;
    const double b = cfg.schedule.b0 * t * t;
    const double w = b - 1.0 / t;  // beta = 1
    const double mixed = c * x + t * v + t * grad;
    const double expected = (t * t * w + (8.0 - c) * t) * gap + 0.5 * mixed * mixed +
                            0.5 * c * (8.0 - c) * x * x;
    EXPECT_NEAR(energy(cfg, t, v1(x), v1(v), c), expected, 1e-11 * std::abs(expected));
  }
}

TEST(Energy, LastSummandDropsAtUpperC) {
  const SystemConfig cfg = figure1(2.0);
  // With c = alpha - 1 and x at the kink-free region, E is gap term plus the mixed square.
  const double t = 3.0, x = 0.5, v = 0.25;
  const double grad = x / t;
  const double gap = x * x / (2.0 * t);
  const double w = cfg.schedule.b0 * t * t - 1.0 / t;
  const double mixed = 8.0 * x + t * v + t * grad;
  EXPECT_NEAR(energy(cfg, t, v1(x), v1(v), 8.0), t * t * w * gap + 0.5 * mixed * mixed, 1e-12);
}

Trajectory synthetic(double exponent, int count = 200) {
  Trajectory traj;
  for (int k = 0; k < count; ++k) {
    Sample s;
    s.t = std::pow(100.0, static_cast<double>(k) / (count - 1));
    s.envelope_gap = std::pow(s.t, exponent);
    s.velocity_norm = 2.0 * std::pow(s.t, -1.0);
    s.grad_norm = k % 2 ? 1e-16 : std::pow(s.t, -2.0);
    traj.samples.push_back(s);
  }
  return traj;
}

TEST(FitRate, ExactPowerLaw) {
  const RateFit fit = fit_rate(synthetic(-3.0), Quantity::envelope_gap);
  EXPECT_NEAR(fit.exponent, -3.0, 1e-6);
  EXPECT_GE(fit.r_squared, 0.999999);
  EXPECT_NEAR(fit.t_lo, 10.0, 1e-12);
  EXPECT_EQ(fit.t_hi, 100.0);
  const RateFit v = fit_rate(synthetic(-3.0), Quantity::velocity_norm, std::make_pair(1.0, 100.0));
  EXPECT_NEAR(v.exponent, -1.0, 1e-9);
  EXPECT_NEAR(v.intercept, std::log(2.0), 1e-9);
  EXPECT_EQ(v.samples_used, 200);
}

TEST(FitRate, DropsTinyValues) {
  const RateFit fit = fit_rate(synthetic(-3.0), Quantity::grad_norm, std::make_pair(1.0, 100.0));
  EXPECT_EQ(fit.samples_used, 100);
  EXPECT_NEAR(fit.exponent, -2.0, 1e-9);
}

TEST(FitRate, TooFewSamplesRejected) {
  EXPECT_THROW(fit_rate(synthetic(-3.0, 15), Quantity::envelope_gap), InvalidInput);
  EXPECT_THROW(fit_rate(synthetic(-3.0), Quantity::prox_dist), InvalidInput);
  EXPECT_THROW(fit_rate(synthetic(-3.0), Quantity::envelope_gap, std::make_pair(5.0, 5.0)),
               InvalidInput);
}

TEST(Integrals, LastDecadeShare) {
  std::vector<double> t, c;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(1.0 + k * 0.99);
    c.push_back(t.back());
  }
  // Linear cumulative on [1, 100]: (100 - 10) / 99.
  EXPECT_NEAR(last_decade_share(t, c), 90.0 / 99.0, 1e-12);
  std::vector<double> flat(t.size(), 2.0);
  EXPECT_EQ(last_decade_share(t, flat), 0.0);
  EXPECT_THROW(last_decade_share({}, {}), InvalidInput);
}

TEST(Integrals, EquilibriumIsZero) {
  SystemConfig cfg = figure1(4.0);
  cfg.x0 = v1(0.0);
  const IntegrationResult r = integrate(cfg);
  ASSERT_TRUE(r.ok());
  const IntegralSeries series = accumulate_theorem2_integrals(cfg, r.trajectory);
  ASSERT_EQ(series.cumulative.size(), 5u);
  for (const auto& [name, values] : series.cumulative) EXPECT_EQ(values.back(), 0.0) << name;
  const MonotonicityReport m = energy_monotonicity_report(cfg, r.trajectory, 8.0);
  EXPECT_EQ(m.max_uphill, 0.0);
  EXPECT_TRUE(m.pass);
}

TEST(Integrals, SettleOnFigureConfig) {
  const SystemConfig cfg = figure1(4.0);
  const IntegrationResult r = integrate(cfg);
  ASSERT_TRUE(r.ok());
  const IntegralSeries series = accumulate_theorem2_integrals(cfg, r.trajectory);
  for (const auto& [name, values] : series.cumulative) {
    EXPECT_LT(last_decade_share(series.times, values), 0.05) << name;
  }
}

// Trapezoid rule against a closed form: x = 0 at rest except the velocity
// integral t |v|^2 with v = 1/t, whose integral over [1, 100] is log(100).
TEST(Integrals, TrapezoidAgainstClosedForm) {
  SystemConfig cfg = figure1(4.0);
  Trajectory traj;
  for (int k = 0; k < 2000; ++k) {
    Sample s;
    s.t = std::pow(100.0, k / 1999.0);
    s.x = v1(0.0);
    s.v = v1(1.0 / s.t);
    traj.samples.push_back(s);
  }
  const IntegralSeries series = accumulate_theorem2_integrals(cfg, traj);
  EXPECT_NEAR(series.cumulative.at("v").back(), std::log(100.0), 1e-5);
  EXPECT_EQ(series.cumulative.at("iii").back(), 0.0);
}

TEST(Monotonicity, DetectsUphill) {
  const SystemConfig cfg = figure1(2.0);
  Trajectory traj;
  for (int k = 0; k < 10; ++k) {
    Sample s;
    s.t = 1.0 + k;
    s.x = v1(0.1 * k);
    s.v = v1(0.0);
    traj.samples.push_back(s);
  }
  const MonotonicityReport m = energy_monotonicity_report(cfg, traj, 8.0);
  EXPECT_FALSE(m.pass);
  EXPECT_GT(m.max_uphill, 1e-6);
  EXPECT_GT(m.at_time, 1.0);
}

TEST(Monotonicity, FigureRunsDecay) {
  for (const SystemConfig& cfg : {figure1(4.0), figure3(2.0)}) {
    const IntegrationResult r = integrate(cfg);
    ASSERT_TRUE(r.ok());
    const double c = cfg.schedule.alpha - 1.0;
    const MonotonicityReport m = energy_monotonicity_report(cfg, r.trajectory, c);
    EXPECT_TRUE(m.pass) << m.max_uphill << " at " << m.at_time;
    // The gap bound E(t0) / (t^2 w(t)) follows from the decay.
    const double e0 = energy(cfg, r.trajectory.front().t, r.trajectory.front().x,
                             r.trajectory.front().v, c);
    for (const Sample& s : r.trajectory.samples) {
      const double w = eval(cfg.schedule, s.t).w;
      EXPECT_LE(s.envelope_gap, e0 / (s.t * s.t * w) + 1e-8) << s.t;
    }
  }
}

TEST(ScaledGap, EventuallySmall) {
  for (const SystemConfig& cfg : {figure1(2.0), figure3(2.0)}) {
    const IntegrationResult r = integrate(cfg);
    ASSERT_TRUE(r.ok());
    double peak = 0.0;
    for (const Sample& s : r.trajectory.samples) peak = std::max(peak, s.scaled_gap);
    EXPECT_LE(r.trajectory.back().scaled_gap, 0.1 * peak);
    const double t = r.trajectory.back().t;
    EXPECT_NEAR(r.trajectory.back().scaled_gap,
                t * t * eval(cfg.schedule, t).b * r.trajectory.back().envelope_gap,
                1e-12 * r.trajectory.back().scaled_gap);
  }
}

}  // namespace
}  // namespace imdyn
