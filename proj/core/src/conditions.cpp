#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "imdyn/analysis.hpp"
#include "imdyn/errors.hpp"

namespace imdyn {
namespace {

ConditionVerdict pass(std::string witness) { return {true, std::move(witness)}; }
ConditionVerdict fail(std::string witness) { return {false, std::move(witness)}; }

void finish(ConditionReport& r) {
  r.overall = std::all_of(r.per_condition.begin(), r.per_condition.end(),
                          [](const auto& kv) { return kv.second.pass; });
}

double epsilon_from_cap(double eps_max, double alpha) {
  return 0.5 * std::min(eps_max, alpha - 1.0);
}

}  // namespace

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::I: return "I";
    case Condition::II: return "II";
    case Condition::III: return "III";
    case Condition::IV: return "IV";
    case Condition::V: return "V";
    case Condition::VI: return "VI";
    case Condition::VII: return "VII";
  }
  return "?";
}

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::setting1: return "Setting1";
    case Setting::setting2: return "Setting2";
    case Setting::not_polynomial: return "NotPolynomial";
  }
  return "?";
}

std::vector<Condition> ConditionReport::violated() const {
  std::vector<Condition> out;
  for (const auto& [c, verdict] : per_condition) {
    if (!verdict.pass) out.push_back(c);
  }
  return out;
}

ConditionReport check_conditions_polynomial(const PolynomialSchedule& s) {
  ConditionReport r;
  const double alpha = s.alpha;
  const double t0 = s.t0;
  const bool damped = s.beta0 > 0.0;
  r.setting = damped ? Setting::setting2 : Setting::setting1;

  // (I): (alpha-3) w - t w' = (alpha-3-n) b - K t^(m-1) with K = beta0 (m+1)(alpha-m-2),
  // so the admissible eps are those below (alpha-3-n) - (K/b0) t^(-p) for all t >= t0.
  {
    const double margin = alpha - 3.0 - s.n;
    const double k = damped ? s.beta0 * (s.m + 1.0) * (alpha - s.m - 2.0) : 0.0;
    const double p = s.n - s.m + 1.0;
    double eps_max = 0.0;
    bool bounded = true;
    if (p > 0.0) {
      eps_max = margin - std::max(k, 0.0) / (s.b0 * std::pow(t0, p));
    } else if (p == 0.0) {
      eps_max = margin - k / s.b0;
    } else if (k > 0.0) {
      bounded = false;
    } else {
      eps_max = margin - k / (s.b0 * std::pow(t0, p));
    }
    if (!(alpha > 1.0)) {
      r.per_condition[Condition::I] = fail(fmt::format("alpha > 1 violated (alpha = {})", alpha));
    } else if (!bounded) {
      r.per_condition[Condition::I] = fail(fmt::format(
          "m <= n+1 violated ({} > {}) while (m+1)(alpha-m-2) beta0 = {} > 0", s.m, s.n + 1.0, k));
    } else if (!(eps_max > 0.0)) {
      if (margin <= 0.0) {
        r.per_condition[Condition::I] = fail(
            fmt::format("alpha-3 > n violated ({} > {} false)", alpha - 3.0, s.n));
      } else {
        r.per_condition[Condition::I] = fail(fmt::format(
            "b0 > (m+1)(alpha-m-2) beta0 / ((alpha-3-n) t0^(n-m+1)) violated ({} > {} false)",
            s.b0, std::max(k, 0.0) / (margin * std::pow(t0, p))));
      }
    } else {
      const double eps = epsilon_from_cap(eps_max, alpha);
      r.epsilon_witness = eps;
      r.per_condition[Condition::I] =
          pass(fmt::format("eps = {:.6g} (admissible up to {:.6g})", eps, eps_max));
    }
  }

  // (II): beta and lambda nondecreasing.
  if (s.l < 0.0) {
    r.per_condition[Condition::II] = fail(fmt::format("l >= 0 violated (l = {})", s.l));
  } else if (damped && s.m < 0.0) {
    r.per_condition[Condition::II] = fail(fmt::format("m >= 0 violated (m = {})", s.m));
  } else {
    r.per_condition[Condition::II] = pass("l >= 0" + std::string(damped ? ", m >= 0" : ""));
  }

  // (III) and (VI): w > 0 iff b0 t^p > (m+1) beta0, and beta/(t w) = beta0 / (b0 t^p - R).
  {
    const double rr = damped ? (s.m + 1.0) * s.beta0 : 0.0;
    const double p = s.n - s.m + 1.0;
    const double at_t0 = s.b0 * std::pow(t0, p) - rr;
    double at_inf;
    if (p > 0.0) {
      at_inf = std::numeric_limits<double>::infinity();
    } else if (p == 0.0) {
      at_inf = s.b0 - rr;
    } else {
      at_inf = -rr;
    }
    // b0 t^p - R is monotone in t, so its infimum is at t0 or at infinity.
    const bool w_positive = at_t0 > 0.0 && at_inf >= 0.0 && !(p < 0.0 && rr > 0.0);
    if (w_positive) {
      r.per_condition[Condition::III] = pass(damped ? "b > beta' + beta/t for all t >= t0" : "b > 0");
    } else if (p < 0.0 && rr > 0.0) {
      r.per_condition[Condition::III] =
          fail(fmt::format("m <= n+1 violated ({} > {})", s.m, s.n + 1.0));
    } else {
      r.per_condition[Condition::III] = fail(fmt::format(
          "b0 t0^(n-m+1) > (m+1) beta0 violated ({} <= {})", s.b0 * std::pow(t0, p), rr));
    }
    if (!damped) {
      r.per_condition[Condition::VI] = pass("beta = 0");
    } else if (!w_positive) {
      r.per_condition[Condition::VI] = fail("w > 0 fails, beta/(t w) is not bounded");
    } else if (!(std::min(at_t0, at_inf) > 0.0)) {
      r.per_condition[Condition::VI] = fail("beta/(t w) grows without bound");
    } else {
      r.per_condition[Condition::VI] =
          pass(fmt::format("sup beta/(t w) = {:.6g}", s.beta0 / std::min(at_t0, at_inf)));
    }
  }

  // (IV): integrand [P - Q t^s]_+ t^e with P = (beta0 l/lambda0)^2, Q = l b0 / (2 lambda0),
  // s = n + l - 2m, e = 2m - 2l + 1.
  {
    const double pp = std::pow(s.beta0 * s.l / s.lambda0, 2);
    const double qq = s.l * s.b0 / (2.0 * s.lambda0);
    const double sx = s.n + s.l - 2.0 * s.m;
    const double ex = 2.0 * s.m - 2.0 * s.l + 1.0;
    auto integrable = [](double exponent) { return exponent < -1.0; };
    ConditionVerdict v;
    if (qq > 0.0) {
      if (sx > 0.0 || pp == 0.0) {
        v = pass("integrand vanishes for large t");
      } else if (sx == 0.0) {
        if (pp <= qq) {
          v = pass("2m = n+l and b0 >= 2 l beta0^2 / lambda0");
        } else if (integrable(ex)) {
          v = pass(fmt::format("integrand ~ t^{} is integrable", ex));
        } else {
          v = fail(fmt::format("b0 >= 2 l beta0^2 / lambda0 violated ({} < {})", s.b0,
                               2.0 * s.l * s.beta0 * s.beta0 / s.lambda0));
        }
      } else if (integrable(ex)) {
        v = pass(fmt::format("integrand ~ t^{} is integrable", ex));
      } else {
        v = fail(fmt::format("2m < n+l violated ({} > {})", 2.0 * s.m, s.n + s.l));
      }
    } else if (qq == 0.0) {
      v = (pp == 0.0 || integrable(ex)) ? pass("integrand ~ 0 or integrable")
                                        : fail(fmt::format("integrand ~ t^{} is not integrable", ex));
    } else {
      const bool ok = (pp == 0.0 || integrable(ex)) && integrable(sx + ex);
      const double worst = pp > 0.0 ? std::max(ex, sx + ex) : sx + ex;
      v = ok ? pass("integrand is integrable")
             : fail(fmt::format("integrand ~ t^{} is not integrable", worst));
    }
    r.per_condition[Condition::IV] = v;
  }

  // (V): d/dt (t^2 b) = (n+2) t b.
  r.growth_constant = s.n + 2.0;
  r.per_condition[Condition::V] = pass(fmt::format("C = n+2 = {}", s.n + 2.0));

  // (VII): lambda/t = lambda0 t^(l-1).
  r.per_condition[Condition::VII] = s.l <= 1.0 ? pass("l <= 1")
                                               : fail(fmt::format("l <= 1 violated (l = {})", s.l));
  finish(r);
  return r;
}

ParameterFunctions as_functions(const PolynomialSchedule& s) {
  ParameterFunctions f;
  f.lambda.value = [s](double t) { return eval(s, t).lambda; };
  f.lambda.d1 = [s](double t) { return eval(s, t).dlambda; };
  f.beta.value = [s](double t) { return eval(s, t).beta; };
  f.beta.d1 = [s](double t) { return eval(s, t).dbeta; };
  f.beta.d2 = [s](double t) { return eval(s, t).ddbeta; };
  f.b.value = [s](double t) { return eval(s, t).b; };
  f.b.d1 = [s](double t) { return eval(s, t).db; };
  return f;
}

namespace {

// Supremum evidence: the maximum over the last decade of the grid may not
// exceed the maximum over the rest by more than 1%.
bool sup_stabilised(const std::vector<double>& t, const std::vector<double>& f, double t_max,
                    double* sup) {
  double head = -std::numeric_limits<double>::infinity();
  double tail = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_max / 10.0) {
      head = std::max(head, f[k]);
    } else {
      tail = std::max(tail, f[k]);
    }
  }
  *sup = std::max(head, tail);
  return tail <= head + 0.01 * std::abs(head) + 1e-12;
}

}  // namespace

ConditionReport check_conditions_grid(double alpha, const ParameterFunctions& f, double t0,
                                      double t_max, int grid) {
  if (grid < 100) throw InvalidInput(fmt::format("grid: need at least 100 points, got {}", grid));
  if (!(t0 > 0.0) || !(t_max > t0) || !std::isfinite(t_max)) {
    throw InvalidInput(fmt::format("grid range [{}, {}] is invalid", t0, t_max));
  }
  if (!f.lambda.value || !f.lambda.d1 || !f.beta.value || !f.beta.d1 || !f.beta.d2 ||
      !f.b.value || !f.b.d1) {
    throw InvalidInput("grid check needs lambda, lambda', beta, beta', beta'', b, b'");
  }
  const auto n = static_cast<std::size_t>(grid);
  std::vector<double> t(n), lam(n), dlam(n), beta(n), dbeta(n), ddbeta(n), b(n), db(n), w(n), dw(n);
  const double log_ratio = std::log(t_max / t0);
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = k + 1 == n ? t_max : t0 * std::exp(log_ratio * static_cast<double>(k) / (grid - 1));
    t[k] = tk;
    lam[k] = f.lambda.value(tk);
    dlam[k] = f.lambda.d1(tk);
    beta[k] = f.beta.value(tk);
    dbeta[k] = f.beta.d1(tk);
    ddbeta[k] = f.beta.d2(tk);
    b[k] = f.b.value(tk);
    db[k] = f.b.d1(tk);
    for (double v : {lam[k], dlam[k], beta[k], dbeta[k], ddbeta[k], b[k], db[k]}) {
      if (!std::isfinite(v)) {
        throw InvalidInput(fmt::format("parameter function is not finite at t = {}", tk));
      }
    }
    w[k] = b[k] - dbeta[k] - beta[k] / tk;
    dw[k] = db[k] - ddbeta[k] - dbeta[k] / tk + beta[k] / (tk * tk);
  }

  ConditionReport r;
  r.setting = Setting::not_polynomial;

  // (I)
  {
    double eps_max = std::numeric_limits<double>::infinity();
    double at = t0;
    bool b_positive = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(b[k] > 0.0)) {
        b_positive = false;
        at = t[k];
        break;
      }
      const double ratio = ((alpha - 3.0) * w[k] - t[k] * dw[k]) / b[k];
      if (ratio < eps_max) {
        eps_max = ratio;
        at = t[k];
      }
    }
    if (!(alpha > 1.0)) {
      r.per_condition[Condition::I] = fail(fmt::format("alpha > 1 violated (alpha = {})", alpha));
    } else if (!b_positive) {
      r.per_condition[Condition::I] = fail(fmt::format("b > 0 violated at t = {}", at));
    } else if (!(eps_max > 0.0)) {
      r.per_condition[Condition::I] = fail(fmt::format(
          "((alpha-3) w - t w') / b = {:.6g} <= 0 at t = {:.6g}", eps_max, at));
    } else {
      const double eps = epsilon_from_cap(eps_max, alpha);
      r.epsilon_witness = eps;
      r.per_condition[Condition::I] =
          pass(fmt::format("eps = {:.6g} (grid minimum {:.6g} at t = {:.6g})", eps, eps_max, at));
    }
  }

  // (II)
  {
    ConditionVerdict v = pass("lambda' >= 0 and beta' >= 0 on the grid");
    for (std::size_t k = 0; k < n; ++k) {
      if (dlam[k] < 0.0) {
        v = fail(fmt::format("lambda' >= 0 violated at t = {:.6g}", t[k]));
        break;
      }
      if (dbeta[k] < 0.0) {
        v = fail(fmt::format("beta' >= 0 violated at t = {:.6g}", t[k]));
        break;
      }
    }
    r.per_condition[Condition::II] = v;
  }

  // (III) and (VI)
  {
    std::size_t bad = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(w[k] > 0.0)) {
        bad = k;
        break;
      }
    }
    r.per_condition[Condition::III] =
        bad == n ? pass("b > beta' + beta/t on the grid")
                 : fail(fmt::format("b > beta' + beta/t violated at t = {:.6g}", t[bad]));
    const bool undamped = std::all_of(beta.begin(), beta.end(), [](double v) { return v == 0.0; });
    if (undamped) {
      r.per_condition[Condition::VI] = pass("beta = 0");
    } else if (bad != n) {
      r.per_condition[Condition::VI] = fail("w > 0 fails, beta/(t w) is not bounded");
    } else {
      std::vector<double> ratio(n);
      for (std::size_t k = 0; k < n; ++k) ratio[k] = beta[k] / (t[k] * w[k]);
      double sup = 0.0;
      r.per_condition[Condition::VI] =
          sup_stabilised(t, ratio, t_max, &sup)
              ? pass(fmt::format("sup beta/(t w) ~ {:.6g}", sup))
              : fail(fmt::format("beta/(t w) still growing near t_max ({:.6g})", sup));
    }
  }

  // (IV)
  {
    std::vector<double> cumulative(n, 0.0);
    double previous = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double l2 = lam[k] * lam[k];
      const double g = std::max(
          0.0, beta[k] * beta[k] * dlam[k] * dlam[k] * t[k] * t[k] * t[k] / (l2 * l2) -
                   dlam[k] * t[k] * t[k] * b[k] / (2.0 * l2));
      if (k > 0) cumulative[k] = cumulative[k - 1] + 0.5 * (g + previous) * (t[k] - t[k - 1]);
      previous = g;
    }
    const double share = last_decade_share(t, cumulative);
    r.per_condition[Condition::IV] =
        share < 0.01
            ? pass(fmt::format("integral ~ {:.6g}, last decade adds {:.3g}%", cumulative.back(),
                               100.0 * share))
            : fail(fmt::format("integral not settling: last decade adds {:.3g}% of {:.6g}",
                               100.0 * share, cumulative.back()));
  }

  // (V)
  {
    std::vector<double> ratio(n);
    for (std::size_t k = 0; k < n; ++k) ratio[k] = 2.0 + t[k] * db[k] / b[k];
    double sup = 0.0;
    const bool ok = sup_stabilised(t, ratio, t_max, &sup);
    if (ok) r.growth_constant = sup;
    r.per_condition[Condition::V] = ok ? pass(fmt::format("C ~ {:.6g}", sup))
                                       : fail(fmt::format("(t^2 b)'/(t b) still growing ({:.6g})", sup));
  }

  // (VII)
  {
    std::vector<double> ratio(n);
    for (std::size_t k = 0; k < n; ++k) ratio[k] = lam[k] / t[k];
    double sup = 0.0;
    r.per_condition[Condition::VII] =
        sup_stabilised(t, ratio, t_max, &sup)
            ? pass(fmt::format("sup lambda/t ~ {:.6g}", sup))
            : fail(fmt::format("lambda/t still growing near t_max ({:.6g})", sup));
  }
  finish(r);
  return r;
}

}  // namespace imdyn
