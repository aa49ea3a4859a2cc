#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "imdyn/chebyshev.hpp"
#include "imdyn/dopri5.hpp"
#include "imdyn/riccati.hpp"

namespace imdyn {
namespace {

TEST(DormandPrince, ExponentialDecay) {
  DormandPrince rk([](double, const Vector& y, Vector& dy) { dy = -y; }, 1e-12, 1e-14);
  rk.reset(0.0, Vector::Ones(1));
  while (rk.time() < 5.0) ASSERT_EQ(rk.step(5.0), DormandPrince::StepResult::accepted);
  EXPECT_EQ(rk.time(), 5.0);
  EXPECT_NEAR(rk.state()[0], std::exp(-5.0), 1e-11);
}

TEST(DormandPrince, DenseOutputOfOscillator) {
  DormandPrince rk(
      [](double, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy << y[1], -y[0];
      },
      1e-10, 1e-12);
  Vector y0(2);
  y0 << 1.0, 0.0;
  rk.reset(0.0, y0);
  Vector out;
  double worst = 0.0;
  while (rk.time() < 20.0) {
    ASSERT_EQ(rk.step(20.0), DormandPrince::StepResult::accepted);
    for (int k = 1; k < 4; ++k) {
      const double t = rk.previous_time() + 0.25 * k * (rk.time() - rk.previous_time());
      rk.interpolate(t, out);
      worst = std::max(worst, std::abs(out[0] - std::cos(t)));
    }
  }
  EXPECT_LT(worst, 1e-7);
  EXPECT_NEAR(rk.state()[0], std::cos(20.0), 1e-8);
}

TEST(DormandPrince, StopsExactlyAtRequestedTime) {
  DormandPrince rk([](double t, const Vector&, Vector& dy) { dy = Vector::Constant(1, t); }, 1e-8,
                   1e-12);
  rk.reset(1.0, Vector::Zero(1));
  for (double stop : {1.3, 2.0, 2.0, 7.5}) {
    while (rk.time() < stop) ASSERT_EQ(rk.step(stop), DormandPrince::StepResult::accepted);
    EXPECT_EQ(rk.time(), stop);
  }
  EXPECT_NEAR(rk.state()[0], 0.5 * (7.5 * 7.5 - 1.0), 1e-10);
}

// A zero component with a tiny abs_tol once drove the first step onto the
// underflow floor.
TEST(DormandPrince, StartsWithZeroComponentAndTinyAbsTol) {
  DormandPrince rk(
      [](double, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy << -y[1], y[0];
      },
      1e-8, 1e-20);
  Vector y0(2);
  y0 << 10.0, 0.0;
  rk.reset(1.0, y0);
  EXPECT_EQ(rk.step(2.0), DormandPrince::StepResult::accepted);
}

TEST(DormandPrince, NonFiniteReported) {
  DormandPrince rk([](double, const Vector& y, Vector& dy) { dy = y.array().square() * 1e300; },
                   1e-8, 1e-12);
  rk.reset(0.0, Vector::Ones(1));
  DormandPrince::StepResult r = DormandPrince::StepResult::accepted;
  for (int i = 0; i < 10000 && r == DormandPrince::StepResult::accepted && rk.time() < 1.0; ++i) {
    r = rk.step(1.0);
  }
  EXPECT_NE(r, DormandPrince::StepResult::accepted);
}

TEST(Chebyshev, DifferentiatesAndIntegratesPolynomials) {
  const ChebyshevGrid grid(16);
  const Eigen::VectorXd& x = grid.nodes();
  EXPECT_EQ(x[0], -1.0);
  EXPECT_EQ(x[15], 1.0);
  const Eigen::VectorXd f = x.array().pow(5) - 2.0 * x.array();
  const Eigen::VectorXd df = 5.0 * x.array().pow(4) - 2.0;
  const Eigen::VectorXd integral = (x.array().pow(6) - 1.0) / 6.0 - (x.array().square() - 1.0);
  EXPECT_LT((grid.differentiation() * f - df).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((grid.integration() * f - integral).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Chebyshev, CoefficientsRecoverExpansion) {
  const ChebyshevGrid grid(12);
  // 3 T_0 - T_2 + 0.5 T_7 at the nodes.
  Eigen::VectorXd f(12);
  for (int j = 0; j < 12; ++j) {
    const double th = std::acos(grid.nodes()[j]);
    f[j] = 3.0 - std::cos(2.0 * th) + 0.5 * std::cos(7.0 * th);
  }
  const Eigen::VectorXd a = grid.coefficients(f);
  for (int k = 0; k < 12; ++k) {
    const double expected = k == 0 ? 3.0 : k == 2 ? -1.0 : k == 7 ? 0.5 : 0.0;
    EXPECT_NEAR(a[k], expected, 1e-13) << k;
  }
}

Eigen::VectorXd mapped(const ChebyshevGrid& grid, double ta, double tb) {
  return (ta + 0.5 * (tb - ta) * (grid.nodes().array() + 1.0)).matrix();
}

TEST(Riccati, ConstantCoefficientOscillator) {
  const ChebyshevGrid grid(16);
  const double p = 0.2, q = 400.0;
  const double ta = 0.0, tb = 3.0;  // roughly ten periods in one step
  const auto step = riccati_step(grid, ta, tb, Eigen::VectorXd::Constant(16, p),
                                 Eigen::VectorXd::Constant(16, q), 1.0, 0.0);
  ASSERT_TRUE(step.has_value());
  const double omega = std::sqrt(q - 0.25 * p * p);
  auto exact = [&](double t) {
    return std::exp(-0.5 * p * t) * (std::cos(omega * t) + 0.5 * p / omega * std::sin(omega * t));
  };
  auto exact_d = [&](double t) {
    const double h = 1e-6;
    return (exact(t + h) - exact(t - h)) / (2.0 * h);
  };
  EXPECT_NEAR(step->u, exact(tb), 1e-11);
  EXPECT_NEAR(step->du, exact_d(tb), 1e-7);
  const Eigen::VectorXd t = mapped(grid, ta, tb);
  for (int j = 0; j < 16; ++j) EXPECT_GE(step->envelope[j] * (1 + 1e-12), std::abs(exact(t[j])));
}

TEST(Riccati, VariableCoefficientsAgainstRungeKutta) {
  // u'' + (9/t) u' + 40 t^4 u = 0 on [20, 21].
  const double ta = 20.0, tb = 21.0;
  auto p_of = [](double t) { return 9.0 / t; };
  auto q_of = [](double t) { return 40.0 * std::pow(t, 4); };
  testing::Gen g(47);
  const ChebyshevGrid grid(16);
  const double tau = 0.05;
  double u = g.uniform(-1.0, 1.0);
  double du = g.uniform(-1.0, 1.0) * std::sqrt(q_of(ta));
  DormandPrince rk(
      [&](double t, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy << y[1], -p_of(t) * y[1] - q_of(t) * y[0];
      },
      1e-12, 1e-15);
  Vector y0(2);
  y0 << u, du;
  rk.reset(ta, y0);
  while (rk.time() < tb) ASSERT_EQ(rk.step(tb), DormandPrince::StepResult::accepted);

  for (double a = ta; a < tb - 1e-12; a += tau) {
    const double b = std::min(a + tau, tb);
    const Eigen::VectorXd t = mapped(grid, a, b);
    Eigen::VectorXd p(16), q(16);
    for (int j = 0; j < 16; ++j) {
      p[j] = p_of(t[j]);
      q[j] = q_of(t[j]);
    }
    const auto step = riccati_step(grid, a, b, p, q, u, du);
    ASSERT_TRUE(step.has_value()) << "a=" << a;
    u = step->u;
    du = step->du;
  }
  const double scale = std::hypot(rk.state()[0], rk.state()[1] / std::sqrt(q_of(tb)));
  EXPECT_NEAR(u, rk.state()[0], 1e-8 * scale);
  EXPECT_NEAR(du / std::sqrt(q_of(tb)), rk.state()[1] / std::sqrt(q_of(tb)), 1e-8 * scale);
}

TEST(Riccati, OverdampedRefused) {
  const ChebyshevGrid grid(16);
  EXPECT_FALSE(riccati_step(grid, 0.0, 1.0, Eigen::VectorXd::Constant(16, 10.0),
                            Eigen::VectorXd::Constant(16, 1.0), 1.0, 0.0));
}

TEST(Riccati, UnresolvedRefused) {
  // q jumps by six orders of magnitude across the step.
  const ChebyshevGrid grid(16);
  const Eigen::VectorXd t = mapped(grid, 1.0, 2.0);
  Eigen::VectorXd q(16);
  for (int j = 0; j < 16; ++j) q[j] = std::pow(10.0, 6.0 * std::tanh(40.0 * (t[j] - 1.5)) + 7.0);
  EXPECT_FALSE(riccati_step(grid, 1.0, 2.0, Eigen::VectorXd::Zero(16), q, 1.0, 0.0));
}

}  // namespace
}  // namespace imdyn
