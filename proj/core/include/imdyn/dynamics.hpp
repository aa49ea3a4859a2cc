#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imdyn/prox.hpp"
#include "imdyn/schedule.hpp"

namespace imdyn {

/// Full simulation setup for
///   x'' + (alpha/t) x' + beta(t) d/dt grad Phi_lambda(t)(x) + b(t) grad Phi_lambda(t)(x) = 0.
struct SystemConfig {
  ProxFunction objective = ProxFunction::l1(1);
  PolynomialSchedule schedule;
  Vector x0 = Vector::Zero(1);
  Vector u0 = Vector::Zero(1);
  double t_end = 100.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-20;
  int sample_count = 1000;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

struct State {
  double t = 0.0;
  Vector x;
  Vector v;
};

/// One trajectory sample. Gaps are measured against the objective's optimal
/// value, distances against its catalog minimizer.
struct Sample {
  double t = 0.0;
  Vector x;
  Vector v;
  double envelope_gap = 0.0;   ///< Phi_lambda(t)(x) - Phi*
  double grad_norm = 0.0;      ///< |grad Phi_lambda(t)(x)|
  double prox_dist = 0.0;      ///< |prox_lambda(t)(x) - x|
  double prox_gap = 0.0;       ///< Phi(prox_lambda(t)(x)) - Phi*
  double velocity_norm = 0.0;  ///< |x'|
  double energy = 0.0;         ///< E_c with c = alpha - 1
  double dist_to_minimizer = 0.0;
  double scaled_gap = 0.0;     ///< t^2 b(t) envelope_gap
};

struct Trajectory {
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }
};

/// Builds a fully instrumented sample at (t, x, v).
Sample make_sample(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v);

/// Derivatives of a two-field first-order reformulation.
struct FirstOrderField {
  Vector dx;
  Vector dy;
};

/// Lifted pair for beta > 0:
///   x' = -beta grad - ((beta' - b)/beta + alpha/t) x - y/beta
///   y' = -(beta'' + (3 b beta' - 2 beta'^2 - b^2)/beta + (alpha/t)(b - beta' - beta/t) - b') x
///        - ((b - 2 beta')/beta) y
/// Throws ConfigurationError when beta0 == 0.
FirstOrderField rhs_beta_positive(const SystemConfig& cfg, double t, const VectorRef& x,
                                  const VectorRef& y);

/// beta == 0: x' = y, y' = -(alpha/t) y - b grad. Throws ConfigurationError
/// when beta0 > 0.
FirstOrderField rhs_beta_zero(const SystemConfig& cfg, double t, const VectorRef& x,
                              const VectorRef& y);

/// Either branch, in the variable z = -x' - beta grad:
///   x' = -beta grad - z,   z' = -(alpha/t) z + (b - beta' - alpha beta/t) grad.
/// Free of 1/beta, so it stays well conditioned when b/beta is large.
FirstOrderField rhs_corrected_velocity(const SystemConfig& cfg, double t, const VectorRef& x,
                                       const VectorRef& z);

struct LiftedState {
  Vector x;
  Vector y;
};

/// (x0, y(t0)) for the branch selected by beta0.
LiftedState initial_lift(const SystemConfig& cfg);

/// y for the branch selected by beta0, given position and velocity at t.
Vector lift(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v);

/// x' from a lifted state (inverse of lift).
Vector velocity_reconstruct(const SystemConfig& cfg, double t, const VectorRef& x,
                            const VectorRef& y);

enum class Formulation {
  corrected_velocity,  ///< (x, z), z = -x' - beta grad
  lifted,              ///< (x, y) via rhs_beta_positive / rhs_beta_zero
};

enum class Stepper {
  /// Runge-Kutta, switching to the phase-function stepper while every
  /// coordinate sits in an affine piece of the gradient and oscillates fast.
  hybrid,
  runge_kutta,
};

struct IntegrateOptions {
  /// Extra sample times merged into the log-spaced grid (outside (t0, t_end)
  /// they are ignored).
  std::vector<double> extra_times;
  Formulation formulation = Formulation::corrected_velocity;
  Stepper stepper = Stepper::hybrid;
  std::uint64_t max_steps = 50'000'000;
};

enum class IntegrationStatus {
  completed,
  diverged,    ///< state became non-finite
  stiff,       ///< step size fell below 1e-12 t
  step_limit,  ///< max_steps Runge-Kutta steps taken
};

std::string_view to_string(IntegrationStatus status);

struct IntegrationResult {
  /// Complete on success, otherwise the samples up to the last finite one.
  Trajectory trajectory;
  IntegrationStatus status = IntegrationStatus::completed;
  double failure_time = 0.0;
  std::string message;
  std::uint64_t rk_steps = 0;
  std::uint64_t rk_rejected = 0;
  std::uint64_t phase_steps = 0;

  bool ok() const { return status == IntegrationStatus::completed; }
};

/// Sample times: sample_count log-spaced points from t0 to t_end merged with
/// the extra times, strictly increasing.
std::vector<double> sample_times(const SystemConfig& cfg, const std::vector<double>& extra = {});

IntegrationResult integrate(const SystemConfig& cfg, const IntegrateOptions& options = {});

/// |x'' + (alpha/t) x' + beta d/dt grad + b grad| at the sample t, with x''
/// and d/dt grad from three-point differences over the adjacent samples.
/// Throws InvalidInput unless t is an interior sample whose neighbours lie
/// within 1e-2 t.
double ode_residual(const SystemConfig& cfg, const Trajectory& traj, double t);

}  // namespace imdyn
