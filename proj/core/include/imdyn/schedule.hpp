#pragma once

namespace imdyn {

/// Monomial parameter functions
///   lambda(t) = lambda0 t^l,  beta(t) = beta0 t^m,  b(t) = b0 t^n,
/// together with the viscous damping coefficient alpha and the initial time t0.
struct PolynomialSchedule {
  double alpha = 3.0;
  double t0 = 1.0;
  double lambda0 = 1.0;
  double l = 0.0;
  double beta0 = 0.0;
  double m = 0.0;
  double b0 = 1.0;
  double n = 0.0;

  /// Throws InvalidInput unless alpha > 1, t0 > 0, lambda0 > 0, b0 > 0 and
  /// beta0 >= 0 (all finite). Exponents are unrestricted.
  void validate() const;

  bool hessian_damped() const { return beta0 > 0.0; }

  friend bool operator==(const PolynomialSchedule&, const PolynomialSchedule&) = default;
};

/// Parameter values and time derivatives at one instant. `w` is the
/// auxiliary function b - beta' - beta / t.
struct ScheduleEval {
  double lambda = 0.0;
  double dlambda = 0.0;
  double beta = 0.0;
  double dbeta = 0.0;
  double ddbeta = 0.0;
  double b = 0.0;
  double db = 0.0;
  double w = 0.0;
  double dw = 0.0;
};

/// Closed-form evaluation; throws InvalidInput for t < s.t0.
ScheduleEval eval(const PolynomialSchedule& s, double t);

/// Coefficient rule for b0 used by the figure presets:
///   (m+1)(alpha-m-2) beta0 / ((alpha-3-n) t0^(n-m+1)) + 1,
/// replaced by 1 when that value is not positive. Throws InvalidInput when
/// alpha - 3 - n == 0.
double default_b0(double alpha, double m, double n, double beta0, double t0);

}  // namespace imdyn
