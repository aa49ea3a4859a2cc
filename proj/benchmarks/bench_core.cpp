#include <cmath>

#include <benchmark/benchmark.h>

#include "imdyn/chebyshev.hpp"
#include "imdyn/dynamics.hpp"
#include "imdyn/prox.hpp"
#include "imdyn/riccati.hpp"
#include "imdyn/schedule.hpp"

namespace {

using namespace imdyn;

SystemConfig figure1_config(double n, double t_end) {
  SystemConfig cfg;
  cfg.objective = ProxFunction::l1(1);
  cfg.schedule.alpha = 9.0;
  cfg.schedule.l = 1.0;
  cfg.schedule.beta0 = 1.0;
  cfg.schedule.m = 0.0;
  cfg.schedule.n = n;
  cfg.schedule.b0 = default_b0(9.0, 0.0, n, 1.0, 1.0);
  cfg.x0 = Vector::Constant(1, 10.0);
  cfg.t_end = t_end;
  return cfg;
}

void BM_ProxClosedForm(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const ProxFunction f = ProxFunction::elastic_abs(dim);
  const Vector x = Vector::LinSpaced(static_cast<Eigen::Index>(dim), -5.0, 5.0);
  Vector out(x.size());
  for (auto _ : state) {
    f.prox_into(0.7, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxClosedForm)->Arg(1)->Arg(64)->Arg(4096);

void BM_ProxNumeric(benchmark::State& state) {
  ScalarConvexFunction phi;
  phi.fn = [](double y) { return std::cosh(y - 1.0); };
  phi.bracket_lo = -50.0;
  phi.bracket_hi = 50.0;
  phi.argmin = 1.0;
  const ProxFunction f = ProxFunction::numeric_separable(1, phi);
  const Vector x = Vector::Constant(1, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(prox(f, 0.5, x));
}
BENCHMARK(BM_ProxNumeric);

void BM_ScheduleEval(benchmark::State& state) {
  const SystemConfig cfg = figure1_config(4.0, 100.0);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(cfg.schedule, t));
    t = t < 100.0 ? t + 0.01 : 1.0;
  }
}
BENCHMARK(BM_ScheduleEval);

void BM_CorrectedVelocityRhs(benchmark::State& state) {
  const SystemConfig cfg = figure1_config(2.0, 100.0);
  const Vector x = Vector::Constant(1, 3.0);
  const Vector z = Vector::Constant(1, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(rhs_corrected_velocity(cfg, 7.0, x, z));
}
BENCHMARK(BM_CorrectedVelocityRhs);

void BM_RiccatiStep(benchmark::State& state) {
  const ChebyshevGrid grid(16);
  const double ta = 50.0;
  const double tb = 51.0;
  Eigen::VectorXd p(grid.size());
  Eigen::VectorXd q(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * grid.nodes()[j];
    p[j] = 9.0 / t;
    q[j] = 1e4 * t;
  }
  for (auto _ : state) benchmark::DoNotOptimize(riccati_step(grid, ta, tb, p, q, 1.0, 0.0));
}
BENCHMARK(BM_RiccatiStep);

void BM_IntegrateFigure1(benchmark::State& state) {
  const SystemConfig cfg = figure1_config(static_cast<double>(state.range(0)), 30.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(cfg));
}
BENCHMARK(BM_IntegrateFigure1)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
