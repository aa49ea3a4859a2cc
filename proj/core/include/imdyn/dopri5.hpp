#pragma once

#include <cstdint>
#include <functional>

#include "imdyn/prox.hpp"

namespace imdyn {

/// Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step size
/// control and the standard fourth-order continuous extension.
class DormandPrince {
 public:
  using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

  enum class StepResult {
    accepted,
    step_underflow,  ///< step size fell below 1e-12 * |t|
    non_finite,      ///< stage values stayed non-finite down to the minimum step
  };

  DormandPrince(Rhs rhs, double rel_tol, double abs_tol);

  /// Starts (or restarts) at (t, y) and picks an initial step.
  void reset(double t, const Vector& y);

  /// Advances by one accepted step, never past `t_stop`.
  StepResult step(double t_stop);

  double time() const { return t_; }
  double previous_time() const { return t_prev_; }
  const Vector& state() const { return y_; }
  /// Size of the next proposed step.
  double proposed_step() const { return h_; }
  std::uint64_t accepted_steps() const { return accepted_; }
  std::uint64_t rejected_steps() const { return rejected_; }

  /// Dense output on [previous_time(), time()].
  void interpolate(double t, Vector& out) const;

 private:
  double error_norm(const Vector& y_old, const Vector& y_new, const Vector& err) const;
  double initial_step(double t_stop) const;

  Rhs rhs_;
  double rel_tol_;
  double abs_tol_;

  double t_ = 0.0;
  double t_prev_ = 0.0;
  double h_ = 0.0;
  double h_last_ = 0.0;
  Vector y_, y_prev_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, err_;
  Vector cont3_, cont4_, cont5_;
  std::uint64_t accepted_ = 0;
  std::uint64_t rejected_ = 0;
  bool fresh_ = true;
};

}  // namespace imdyn
