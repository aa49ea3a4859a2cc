#include "imdyn/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace imdyn {
namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double safety = 0.9;
constexpr double min_factor = 0.2;
constexpr double max_factor = 5.0;
constexpr double relative_step_floor = 1e-12;

}  // namespace

DormandPrince::DormandPrince(Rhs rhs, double rel_tol, double abs_tol)
    : rhs_(std::move(rhs)), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

void DormandPrince::reset(double t, const Vector& y) {
  const Eigen::Index n = y.size();
  t_ = t;
  t_prev_ = t;
  y_ = y;
  y_prev_ = y;
  for (Vector* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &err_, &cont3_, &cont4_, &cont5_}) {
    v->resize(n);
  }
  rhs_(t_, y_, k1_);
  h_ = 0.0;
  h_last_ = 0.0;
  fresh_ = true;
}

double DormandPrince::error_norm(const Vector& y_old, const Vector& y_new, const Vector& err) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = abs_tol_ + rel_tol_ * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
    const double r = err[i] / sk;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

double DormandPrince::initial_step(double t_stop) const {
  // Hairer, Norsett & Wanner, "Solving ODEs I", section II.4.
  auto scaled_norm = [&](const Vector& v) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sk = abs_tol_ + rel_tol_ * std::abs(y_[i]);
      sum += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
  };
  const double span = t_stop - t_;
  const double d0 = scaled_norm(y_);
  const double d1n = scaled_norm(k1_);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * std::max(1.0, std::abs(t_)) : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);
  Vector y1 = y_ + h0 * k1_;
  Vector f1(y_.size());
  rhs_(t_ + h0, y1, f1);
  const double d2 = scaled_norm(f1 - k1_) / h0;
  const double dmax = std::max(d1n, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6 * std::max(1.0, std::abs(t_)), h0 * 1e-3)
                                  : std::pow(0.01 / dmax, 1.0 / 5.0);
  // With a tiny abs_tol and a zero state component the estimate can land on
  // the underflow floor; start above it and let rejections shrink the step.
  const double lowest = 100.0 * relative_step_floor * std::max(std::abs(t_), 1e-300);
  return std::min(std::max(std::min(100.0 * h0, h1), lowest), span);
}

DormandPrince::StepResult DormandPrince::step(double t_stop) {
  if (fresh_) {
    h_ = initial_step(t_stop);
    fresh_ = false;
  }
  bool last_rejected = false;
  for (;;) {
    const double floor = relative_step_floor * std::max(std::abs(t_), 1e-300);
    double h = std::min(h_, t_stop - t_);
    const bool clipped = h < h_;
    if (h < floor && !clipped) return StepResult::step_underflow;

    tmp_ = y_ + h * a21 * k1_;
    rhs_(t_ + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    const double t_new = clipped ? t_stop : t_ + h;
    rhs_(t_new, tmp_, k6_);
    tmp_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t_new, tmp_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

    const double err = error_norm(y_, tmp_, err_);
    if (!std::isfinite(err) || !tmp_.allFinite()) {
      ++rejected_;
      h_ = 0.25 * h;
      if (h_ < floor) return StepResult::non_finite;
      last_rejected = true;
      continue;
    }
    if (err <= 1.0) {
      double factor = err == 0.0 ? max_factor : safety * std::pow(err, -0.2);
      factor = std::clamp(factor, min_factor, last_rejected ? 1.0 : max_factor);
      // Dense output coefficients before the state is overwritten.
      cont3_ = h * k1_ - (tmp_ - y_);
      cont4_ = (tmp_ - y_) - h * k7_ - cont3_;
      cont5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
      y_prev_.swap(y_);
      y_ = tmp_;
      k1_.swap(k7_);
      t_prev_ = t_;
      t_ = t_new;
      h_last_ = h;
      if (!clipped) h_ = h * factor;
      ++accepted_;
      return StepResult::accepted;
    }
    ++rejected_;
    h_ = h * std::max(min_factor, safety * std::pow(err, -0.2));
    last_rejected = true;
  }
}

void DormandPrince::interpolate(double t, Vector& out) const {
  if (h_last_ == 0.0) {
    out = y_;
    return;
  }
  const double theta = (t - t_prev_) / h_last_;
  const double theta1 = 1.0 - theta;
  out = y_prev_ + theta * ((y_ - y_prev_) + theta1 * (cont3_ + theta * (cont4_ + theta1 * cont5_)));
}

}  // namespace imdyn
