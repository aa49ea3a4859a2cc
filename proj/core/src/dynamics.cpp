#include "imdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "imdyn/analysis.hpp"
#include "imdyn/chebyshev.hpp"
#include "imdyn/dopri5.hpp"
#include "imdyn/errors.hpp"
#include "imdyn/riccati.hpp"

namespace imdyn {
namespace {

void gradient_into(const ProxFunction& f, double lambda, const VectorRef& x, Vector& prox_ws,
                   Vector& grad) {
  prox_ws.resize(x.size());
  f.prox_into(lambda, x, prox_ws);
  grad = (x - prox_ws) / lambda;
}

Vector gradient(const ProxFunction& f, double lambda, const VectorRef& x) {
  Vector ws, g;
  gradient_into(f, lambda, x, ws, g);
  return g;
}

void check_state(const SystemConfig& cfg, const VectorRef& x, const VectorRef& y) {
  const auto d = static_cast<Eigen::Index>(cfg.objective.dimension());
  if (x.size() != d || y.size() != d) {
    throw InvalidInput(fmt::format("state dimension mismatch: objective has {}, got {} and {}", d,
                                   x.size(), y.size()));
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

// Coefficient of x in the y equation of the lifted beta > 0 system.
double lifted_x_coefficient(const ScheduleEval& e, double alpha, double t) {
  return e.ddbeta + (3.0 * e.b * e.dbeta - 2.0 * e.dbeta * e.dbeta - e.b * e.b) / e.beta +
         (alpha / t) * (e.b - e.dbeta - e.beta / t) - e.db;
}

}  // namespace

void SystemConfig::validate() const {
  schedule.validate();
  const auto d = static_cast<Eigen::Index>(objective.dimension());
  if (x0.size() != d) {
    throw InvalidInput(fmt::format("x0: expected {} coordinates, got {}", d, x0.size()));
  }
  if (u0.size() != d) {
    throw InvalidInput(fmt::format("u0: expected {} coordinates, got {}", d, u0.size()));
  }
  if (!x0.allFinite()) throw InvalidInput("x0: entries must be finite");
  if (!u0.allFinite()) throw InvalidInput("u0: entries must be finite");
  if (!std::isfinite(t_end) || !(t_end > schedule.t0)) {
    throw InvalidInput(fmt::format("t_end: must be finite and exceed t0 = {}, got {}", schedule.t0,
                                   t_end));
  }
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw InvalidInput(fmt::format("rel_tol: must be positive, got {}", rel_tol));
  }
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
    throw InvalidInput(fmt::format("abs_tol: must be positive, got {}", abs_tol));
  }
  if (sample_count < 2) {
    throw InvalidInput(fmt::format("sample_count: need at least 2, got {}", sample_count));
  }
}

Sample make_sample(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v) {
  const ScheduleEval e = eval(cfg.schedule, t);
  const MoreauEval m = moreau(cfg.objective, e.lambda, x);
  const double fstar = cfg.objective.optimal_value();
  Sample s;
  s.t = t;
  s.x = x;
  s.v = v;
  s.envelope_gap = m.envelope_value - fstar;
  s.grad_norm = m.gradient.norm();
  s.prox_dist = (m.prox_point - x).norm();
  s.prox_gap = cfg.objective.value(m.prox_point) - fstar;
  s.velocity_norm = v.norm();
  s.energy = energy(cfg, t, x, v, cfg.schedule.alpha - 1.0);
  s.dist_to_minimizer = (x - cfg.objective.minimizer()).norm();
  s.scaled_gap = t * t * e.b * s.envelope_gap;
  return s;
}

FirstOrderField rhs_beta_positive(const SystemConfig& cfg, double t, const VectorRef& x,
                                  const VectorRef& y) {
  if (!cfg.schedule.hessian_damped()) {
    throw ConfigurationError("rhs_beta_positive called with beta0 = 0");
  }
  check_state(cfg, x, y);
  const ScheduleEval e = eval(cfg.schedule, t);
  if (!(e.beta > 0.0)) {
    throw ConfigurationError(fmt::format("beta({}) = {} is not positive", t, e.beta));
  }
  const double alpha = cfg.schedule.alpha;
  const Vector g = gradient(cfg.objective, e.lambda, x);
  FirstOrderField f;
  f.dx = -e.beta * g - ((e.dbeta - e.b) / e.beta + alpha / t) * x - y / e.beta;
  f.dy = -lifted_x_coefficient(e, alpha, t) * x - ((e.b - 2.0 * e.dbeta) / e.beta) * y;
  return f;
}

FirstOrderField rhs_beta_zero(const SystemConfig& cfg, double t, const VectorRef& x,
                              const VectorRef& y) {
  if (cfg.schedule.hessian_damped()) {
    throw ConfigurationError("rhs_beta_zero called with beta0 > 0");
  }
  check_state(cfg, x, y);
  const ScheduleEval e = eval(cfg.schedule, t);
  const Vector g = gradient(cfg.objective, e.lambda, x);
  FirstOrderField f;
  f.dx = y;
  f.dy = -(cfg.schedule.alpha / t) * y - e.b * g;
  return f;
}

FirstOrderField rhs_corrected_velocity(const SystemConfig& cfg, double t, const VectorRef& x,
                                       const VectorRef& z) {
  check_state(cfg, x, z);
  const ScheduleEval e = eval(cfg.schedule, t);
  const double alpha = cfg.schedule.alpha;
  const Vector g = gradient(cfg.objective, e.lambda, x);
  FirstOrderField f;
  f.dx = -e.beta * g - z;
  f.dy = -(alpha / t) * z + (e.b - e.dbeta - alpha * e.beta / t) * g;
  return f;
}

Vector lift(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v) {
  check_state(cfg, x, v);
  if (!cfg.schedule.hessian_damped()) return v;
  const ScheduleEval e = eval(cfg.schedule, t);
  const Vector g = gradient(cfg.objective, e.lambda, x);
  return -e.beta * (v + e.beta * g) + (e.b - e.dbeta - cfg.schedule.alpha * e.beta / t) * x;
}

LiftedState initial_lift(const SystemConfig& cfg) {
  cfg.validate();
  return {cfg.x0, lift(cfg, cfg.schedule.t0, cfg.x0, cfg.u0)};
}

Vector velocity_reconstruct(const SystemConfig& cfg, double t, const VectorRef& x,
                            const VectorRef& y) {
  check_state(cfg, x, y);
  if (!cfg.schedule.hessian_damped()) return y;
  const ScheduleEval e = eval(cfg.schedule, t);
  const Vector g = gradient(cfg.objective, e.lambda, x);
  return -e.beta * g - ((e.dbeta - e.b) / e.beta + cfg.schedule.alpha / t) * x - y / e.beta;
}

std::string_view to_string(IntegrationStatus status) {
  switch (status) {
    case IntegrationStatus::completed: return "completed";
    case IntegrationStatus::diverged: return "diverged";
    case IntegrationStatus::stiff: return "stiff";
    case IntegrationStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

std::vector<double> sample_times(const SystemConfig& cfg, const std::vector<double>& extra) {
  const double t0 = cfg.schedule.t0;
  const double t1 = cfg.t_end;
  const int count = cfg.sample_count;
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(count) + extra.size());
  const double log_ratio = std::log(t1 / t0);
  for (int k = 0; k < count; ++k) {
    times.push_back(t0 * std::exp(log_ratio * k / (count - 1)));
  }
  times.front() = t0;
  times.back() = t1;
  for (double t : extra) {
    if (t > t0 && t < t1) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return b - a <= 1e-14 * std::abs(b); }),
              times.end());
  return times;
}

namespace {

// Switching thresholds for the hybrid stepper.
constexpr std::uint64_t kPhaseEntrySteps = 32;
constexpr double kPhaseEntryFraction = 0.5;
constexpr double kPhaseEnvelopeFraction = 0.9;
constexpr double kPhaseMaxRelativeSpan = 0.05;
constexpr int kPhaseNodes = 16;

class Integrator {
 public:
  Integrator(const SystemConfig& cfg, const IntegrateOptions& options)
      : cfg_(cfg),
        options_(options),
        alpha_(cfg.schedule.alpha),
        grid_(kPhaseNodes),
        rk_([this](double t, const Vector& y, Vector& dy) { field(t, y, dy); }, cfg.rel_tol,
            cfg.abs_tol) {
    const auto d = static_cast<Eigen::Index>(cfg.objective.dimension());
    dim_ = d;
    grad_.resize(d);
    prox_.resize(d);
  }

  IntegrationResult run() {
    IntegrationResult result;
    const std::vector<double> times = sample_times(cfg_, options_.extra_times);
    Vector x = cfg_.x0;
    Vector v = cfg_.u0;
    Vector packed(2 * dim_);
    result.trajectory.samples.reserve(times.size());
    result.trajectory.samples.push_back(make_sample(cfg_, times.front(), x, v));

    bool rk_live = false;
    bool phase_last = false;
    std::uint64_t steps_last = 0;
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double ta = times[k - 1];
      const double tb = times[k];
      bool advanced = false;
      if (options_.stepper == Stepper::hybrid && (phase_last || steps_last >= kPhaseEntrySteps) &&
          in_affine_core(ta, x)) {
        advanced = phase_advance(ta, tb, x, v);
        if (advanced) {
          ++result.phase_steps;
          rk_live = false;
        }
      }
      phase_last = advanced;
      if (!advanced) {
        if (!rk_live) {
          pack(ta, x, v, packed);
          rk_.reset(ta, packed);
          rk_live = true;
        }
        const std::uint64_t before = rk_.accepted_steps();
        while (rk_.time() < tb) {
          const auto status = rk_.step(tb);
          if (status != DormandPrince::StepResult::accepted) {
            const bool underflow = status == DormandPrince::StepResult::step_underflow;
            return fail(result, underflow ? IntegrationStatus::stiff : IntegrationStatus::diverged,
                        rk_.time(),
                        underflow ? fmt::format("step size underflow at t = {}", rk_.time())
                                  : fmt::format("state became non-finite after t = {}",
                                                rk_.time()));
          }
          if (rk_.accepted_steps() >= options_.max_steps) {
            return fail(result, IntegrationStatus::step_limit, rk_.time(),
                        fmt::format("step limit {} reached at t = {}", options_.max_steps,
                                    rk_.time()));
          }
        }
        steps_last = rk_.accepted_steps() - before;
        unpack(tb, rk_.state(), x, v);
      }
      if (!all_finite(x) || !all_finite(v)) {
        return fail(result, IntegrationStatus::diverged, tb,
                    fmt::format("state became non-finite at t = {}", tb));
      }
      result.trajectory.samples.push_back(make_sample(cfg_, tb, x, v));
    }
    result.rk_steps = rk_.accepted_steps();
    result.rk_rejected = rk_.rejected_steps();
    return result;
  }

 private:
  IntegrationResult& fail(IntegrationResult& result, IntegrationStatus status, double t,
                          std::string message) {
    result.status = status;
    result.failure_time = t;
    result.message = std::move(message);
    result.rk_steps = rk_.accepted_steps();
    result.rk_rejected = rk_.rejected_steps();
    return result;
  }

  void update_gradient(double lambda, const Eigen::Ref<const Vector>& x) {
    cfg_.objective.prox_into(lambda, x, prox_);
    grad_ = (x - prox_) / lambda;
  }

  void field(double t, const Vector& y, Vector& dy) {
    const auto x = y.head(dim_);
    const auto w = y.segment(dim_, dim_);
    const ScheduleEval e = eval(cfg_.schedule, t);
    update_gradient(e.lambda, x);
    auto dx = dy.head(dim_);
    auto dw = dy.segment(dim_, dim_);
    if (options_.formulation == Formulation::corrected_velocity) {
      dx = -e.beta * grad_ - w;
      dw = -(alpha_ / t) * w + (e.b - e.dbeta - alpha_ * e.beta / t) * grad_;
    } else if (e.beta > 0.0) {
      dx = -e.beta * grad_ - ((e.dbeta - e.b) / e.beta + alpha_ / t) * x - w / e.beta;
      dw = -lifted_x_coefficient(e, alpha_, t) * x - ((e.b - 2.0 * e.dbeta) / e.beta) * w;
    } else {
      dx = w;
      dw = -(alpha_ / t) * w - e.b * grad_;
    }
  }

  void pack(double t, const Vector& x, const Vector& v, Vector& y) {
    y.head(dim_) = x;
    if (options_.formulation == Formulation::corrected_velocity) {
      const ScheduleEval e = eval(cfg_.schedule, t);
      update_gradient(e.lambda, x);
      y.segment(dim_, dim_) = -v - e.beta * grad_;
    } else {
      y.segment(dim_, dim_) = lift(cfg_, t, x, v);
    }
  }

  void unpack(double t, const Vector& y, Vector& x, Vector& v) {
    x = y.head(dim_);
    if (options_.formulation == Formulation::corrected_velocity) {
      const ScheduleEval e = eval(cfg_.schedule, t);
      update_gradient(e.lambda, x);
      v = -y.segment(dim_, dim_) - e.beta * grad_;
    } else {
      v = velocity_reconstruct(cfg_, t, x, y.segment(dim_, dim_));
    }
  }

  bool in_affine_core(double t, const Vector& x) const {
    const double lambda = eval(cfg_.schedule, t).lambda;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const auto piece = cfg_.objective.affine_piece(static_cast<std::size_t>(i), lambda);
      if (!piece) return false;
      if (!(std::abs(x[i] - piece->center) <= kPhaseEntryFraction * piece->half_width)) {
        return false;
      }
    }
    return true;
  }

  // Inside an affine piece each coordinate u = x_i - center obeys
  //   u'' + (alpha/t + beta k) u' + (beta k' + b k) u = 0,  k = gain(lambda(t)),
  // which the phase-function stepper crosses in a few large steps.
  bool phase_advance(double ta, double tb, Vector& x, Vector& v) const {
    const int nodes = grid_.size();
    const int pieces =
        std::max(1, static_cast<int>(std::ceil((tb - ta) / (kPhaseMaxRelativeSpan * ta))));
    Vector nx = x;
    Vector nv = v;
    std::vector<ScheduleEval> at(static_cast<std::size_t>(nodes));
    std::vector<double> node_t(static_cast<std::size_t>(nodes));
    Eigen::VectorXd p(nodes), q(nodes), width(nodes);
    double s0 = ta;
    for (int piece = 1; piece <= pieces; ++piece) {
      const double s1 = piece == pieces ? tb : ta + (tb - ta) * piece / pieces;
      const double half = 0.5 * (s1 - s0);
      for (int j = 0; j < nodes; ++j) {
        const double tj = j == 0 ? s0 : (j == nodes - 1 ? s1 : s0 + half * (1.0 + grid_.nodes()[j]));
        node_t[static_cast<std::size_t>(j)] = tj;
        at[static_cast<std::size_t>(j)] = eval(cfg_.schedule, tj);
      }
      for (Eigen::Index i = 0; i < dim_; ++i) {
        double center = 0.0;
        for (int j = 0; j < nodes; ++j) {
          const ScheduleEval& e = at[static_cast<std::size_t>(j)];
          const auto aff = cfg_.objective.affine_piece(static_cast<std::size_t>(i), e.lambda);
          if (!aff) return false;
          center = aff->center;
          p[j] = alpha_ / node_t[static_cast<std::size_t>(j)] + e.beta * aff->gain;
          q[j] = e.beta * aff->gain_dlambda * e.dlambda + e.b * aff->gain;
          width[j] = aff->half_width;
        }
        const double u = nx[i] - center;
        const double du = nv[i];
        if (u == 0.0 && du == 0.0) continue;
        const auto step = riccati_step(grid_, s0, s1, p, q, u, du);
        if (!step) return false;
        for (int j = 0; j < nodes; ++j) {
          if (!(step->envelope[j] <= kPhaseEnvelopeFraction * width[j])) return false;
        }
        nx[i] = center + step->u;
        nv[i] = step->du;
      }
      s0 = s1;
    }
    x = nx;
    v = nv;
    return true;
  }

  const SystemConfig& cfg_;
  const IntegrateOptions& options_;
  double alpha_;
  Eigen::Index dim_ = 0;
  ChebyshevGrid grid_;
  DormandPrince rk_;
  Vector grad_;
  Vector prox_;
};

}  // namespace

IntegrationResult integrate(const SystemConfig& cfg, const IntegrateOptions& options) {
  cfg.validate();
  Integrator integrator(cfg, options);
  return integrator.run();
}

double ode_residual(const SystemConfig& cfg, const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  const auto it = std::lower_bound(s.begin(), s.end(), t * (1.0 - 1e-9),
                                   [](const Sample& a, double b) { return a.t < b; });
  if (it == s.end() || std::abs(it->t - t) > 1e-9 * std::abs(t)) {
    throw InvalidInput(fmt::format("ode_residual: no sample at t = {}", t));
  }
  const auto k = static_cast<std::size_t>(it - s.begin());
  if (k == 0 || k + 1 >= s.size()) {
    throw InvalidInput(fmt::format("ode_residual: t = {} is not an interior sample", t));
  }
  const Sample& a = s[k - 1];
  const Sample& c = s[k];
  const Sample& b = s[k + 1];
  const double h1 = c.t - a.t;
  const double h2 = b.t - c.t;
  if (h1 > 1e-2 * c.t || h2 > 1e-2 * c.t) {
    throw InvalidInput(fmt::format(
        "ode_residual: neighbours of t = {} are {} and {} apart, need <= {}", t, h1, h2,
        1e-2 * c.t));
  }
  // Three-point derivative at the middle node of a non-uniform stencil.
  const double wa = -h2 / (h1 * (h1 + h2));
  const double wc = (h2 - h1) / (h1 * h2);
  const double wb = h1 / (h2 * (h1 + h2));
  const ScheduleEval ea = eval(cfg.schedule, a.t);
  const ScheduleEval ec = eval(cfg.schedule, c.t);
  const ScheduleEval eb = eval(cfg.schedule, b.t);
  const Vector ga = gradient(cfg.objective, ea.lambda, a.x);
  const Vector gc = gradient(cfg.objective, ec.lambda, c.x);
  const Vector gb = gradient(cfg.objective, eb.lambda, b.x);
  const Vector accel = wa * a.v + wc * c.v + wb * b.v;
  const Vector dgrad = wa * ga + wc * gc + wb * gb;
  return (accel + (cfg.schedule.alpha / c.t) * c.v + ec.beta * dgrad + ec.b * gc).norm();
}

}  // namespace imdyn
