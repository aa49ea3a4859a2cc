#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imdyn/dynamics.hpp"

namespace imdyn {

/// E_c(t) = (t^2 w + (alpha-1-c) t beta)(Phi_lambda(x) - Phi*)
///          + 1/2 |c (x - z) + t v + t beta grad|^2 + c (alpha-1-c)/2 |x - z|^2
/// with z the objective's catalog minimizer. Throws InvalidInput unless
/// 0 <= c <= alpha - 1.
double energy(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v, double c);

enum class Condition { I, II, III, IV, V, VI, VII };
inline constexpr std::array<Condition, 7> all_conditions = {
    Condition::I, Condition::II, Condition::III, Condition::IV,
    Condition::V, Condition::VI, Condition::VII};
std::string_view to_string(Condition c);

enum class Setting {
  setting1,        ///< beta == 0
  setting2,        ///< beta > 0
  not_polynomial,  ///< grid check of caller-supplied functions
};
std::string_view to_string(Setting s);

struct ConditionVerdict {
  bool pass = false;
  std::string witness;
};

struct ConditionReport {
  std::map<Condition, ConditionVerdict> per_condition;
  /// An epsilon in (0, alpha-1) for (I); present iff (I) passes.
  std::optional<double> epsilon_witness;
  /// The constant C of (V) when known.
  std::optional<double> growth_constant;
  bool overall = false;
  Setting setting = Setting::not_polynomial;

  const ConditionVerdict& operator[](Condition c) const { return per_condition.at(c); }
  std::vector<Condition> violated() const;
};

/// Closed-form verdicts for lambda0 t^l, beta0 t^m, b0 t^n.
ConditionReport check_conditions_polynomial(const PolynomialSchedule& s);

/// A parameter function with its first and second derivatives (the second
/// is only used for beta).
struct ParameterFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

struct ParameterFunctions {
  ParameterFunction lambda;
  ParameterFunction beta;
  ParameterFunction b;
};

ParameterFunctions as_functions(const PolynomialSchedule& s);

/// Evaluates each condition on a log-spaced grid over [t0, t_max]. Evidence,
/// not proof: suprema and integrals are judged by whether the last decade of
/// the grid still changes them. Throws InvalidInput for grid < 100, t_max <= t0
/// or non-finite callable output.
ConditionReport check_conditions_grid(double alpha, const ParameterFunctions& f, double t0,
                                      double t_max, int grid);

/// Cumulative trapezoid integrals along a trajectory, keyed "iii", "iv", "v",
/// "vii" and "lemma3".
struct IntegralSeries {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> cumulative;
};

IntegralSeries accumulate_theorem2_integrals(const SystemConfig& cfg, const Trajectory& traj);

/// Share of the total accumulated over [t_end/10, t_end]. 0 when the total is 0.
double last_decade_share(const std::vector<double>& times, const std::vector<double>& cumulative);

enum class Quantity {
  envelope_gap,
  prox_gap,
  grad_norm,
  prox_dist,
  velocity_norm,
  dist_to_minimizer,
};
std::string_view to_string(Quantity q);
double quantity_of(const Sample& s, Quantity q);

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples_used = 0;
};

/// Least-squares slope of log(quantity) against log(t) over the window
/// (default [t_end/10, t_end]). Values <= 1e-14 are dropped; throws
/// InvalidInput if fewer than 10 remain.
RateFit fit_rate(const Trajectory& traj, Quantity q,
                 std::optional<std::pair<double, double>> window = std::nullopt);

struct MonotonicityReport {
  double max_uphill = 0.0;
  double at_time = 0.0;
  bool pass = true;
};

/// Largest (E_c(t_{k+1}) - E_c(t_k)) / max(1, E_c(t_k)) over consecutive
/// samples; passes when it does not exceed 1e-6.
MonotonicityReport energy_monotonicity_report(const SystemConfig& cfg, const Trajectory& traj,
                                              double c);

}  // namespace imdyn
