#include "imdyn/schedule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "imdyn/errors.hpp"

namespace imdyn {

void PolynomialSchedule::validate() const {
  const double all[] = {alpha, t0, lambda0, l, beta0, m, b0, n};
  for (double v : all) {
    if (!std::isfinite(v)) throw InvalidInput("schedule parameters must be finite");
  }
  if (!(alpha > 1.0)) throw InvalidInput(fmt::format("alpha must exceed 1, got {}", alpha));
  if (!(t0 > 0.0)) throw InvalidInput(fmt::format("t0 must be positive, got {}", t0));
  if (!(lambda0 > 0.0)) throw InvalidInput(fmt::format("lambda0 must be positive, got {}", lambda0));
  if (!(b0 > 0.0)) throw InvalidInput(fmt::format("b0 must be positive, got {}", b0));
  if (!(beta0 >= 0.0)) throw InvalidInput(fmt::format("beta0 must be nonnegative, got {}", beta0));
}

ScheduleEval eval(const PolynomialSchedule& s, double t) {
  if (!(t >= s.t0)) {
    throw InvalidInput(fmt::format("schedule evaluated at t = {} before t0 = {}", t, s.t0));
  }
  ScheduleEval e;
  const double inv_t = 1.0 / t;
  e.lambda = s.lambda0 * std::pow(t, s.l);
  e.dlambda = s.l * e.lambda * inv_t;
  if (s.beta0 != 0.0) {
    e.beta = s.beta0 * std::pow(t, s.m);
    e.dbeta = s.m * e.beta * inv_t;
    e.ddbeta = s.m * (s.m - 1.0) * e.beta * inv_t * inv_t;
  }
  e.b = s.b0 * std::pow(t, s.n);
  e.db = s.n * e.b * inv_t;
  e.w = e.b - e.dbeta - e.beta * inv_t;
  e.dw = e.db - e.ddbeta - e.dbeta * inv_t + e.beta * inv_t * inv_t;
  return e;
}

double default_b0(double alpha, double m, double n, double beta0, double t0) {
  const double margin = alpha - 3.0 - n;
  if (margin == 0.0) {
    throw InvalidInput("default b0 undefined for alpha - 3 - n = 0");
  }
  const double b = (m + 1.0) * (alpha - m - 2.0) * beta0 / (margin * std::pow(t0, n - m + 1.0)) + 1.0;
  return b > 0.0 ? b : 1.0;
}

}  // namespace imdyn
