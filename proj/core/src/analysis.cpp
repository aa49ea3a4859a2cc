#include "imdyn/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "imdyn/errors.hpp"

namespace imdyn {

double energy(const SystemConfig& cfg, double t, const VectorRef& x, const VectorRef& v, double c) {
  const double alpha = cfg.schedule.alpha;
  if (!(c >= 0.0 && c <= alpha - 1.0)) {
    throw InvalidInput(fmt::format("energy: c = {} outside [0, alpha - 1 = {}]", c, alpha - 1.0));
  }
  const ScheduleEval e = eval(cfg.schedule, t);
  const MoreauEval m = moreau(cfg.objective, e.lambda, x);
  const Vector dz = x - cfg.objective.minimizer();
  const double gap = m.envelope_value - cfg.objective.optimal_value();
  const Vector mixed = c * dz + t * v + (t * e.beta) * m.gradient;
  return (t * t * e.w + (alpha - 1.0 - c) * t * e.beta) * gap + 0.5 * mixed.squaredNorm() +
         0.5 * c * (alpha - 1.0 - c) * dz.squaredNorm();
}

IntegralSeries accumulate_theorem2_integrals(const SystemConfig& cfg, const Trajectory& traj) {
  static const char* const names[] = {"iii", "iv", "v", "vii", "lemma3"};
  IntegralSeries out;
  const std::size_t n = traj.size();
  out.times.reserve(n);
  std::map<std::string, std::vector<double>> integrand;
  for (const char* name : names) {
    integrand[name].reserve(n);
    out.cumulative[name].assign(n, 0.0);
  }
  const double alpha = cfg.schedule.alpha;
  const Vector& z = cfg.objective.minimizer();
  for (const Sample& s : traj.samples) {
    const double t = s.t;
    const ScheduleEval e = eval(cfg.schedule, t);
    const MoreauEval m = moreau(cfg.objective, e.lambda, s.x);
    const double g2 = m.gradient.squaredNorm();
    out.times.push_back(t);
    integrand["iii"].push_back((t * t * e.w * e.dlambda / 2.0 + t * t * e.beta * e.w) * g2);
    integrand["iv"].push_back(((alpha - 3.0) * t * e.w - t * t * e.dw) * s.envelope_gap);
    integrand["v"].push_back(t * s.v.squaredNorm());
    integrand["vii"].push_back(t * e.b * s.envelope_gap);
    integrand["lemma3"].push_back(t * e.w * m.gradient.dot(s.x - z));
  }
  for (const char* name : names) {
    const auto& f = integrand[name];
    auto& acc = out.cumulative[name];
    for (std::size_t k = 1; k < n; ++k) {
      acc[k] = acc[k - 1] + 0.5 * (f[k] + f[k - 1]) * (out.times[k] - out.times[k - 1]);
    }
  }
  return out;
}

double last_decade_share(const std::vector<double>& times, const std::vector<double>& cumulative) {
  if (times.empty() || times.size() != cumulative.size()) {
    throw InvalidInput("last_decade_share: times and values must be non-empty and equally long");
  }
  const double total = cumulative.back() - cumulative.front();
  if (total == 0.0) return 0.0;
  const double cut = times.back() / 10.0;
  // Linear interpolation of the cumulative value at t_end / 10.
  const auto it = std::lower_bound(times.begin(), times.end(), cut);
  double at_cut = cumulative.front();
  if (it != times.begin() && it != times.end()) {
    const auto k = static_cast<std::size_t>(it - times.begin());
    const double w = (cut - times[k - 1]) / (times[k] - times[k - 1]);
    at_cut = cumulative[k - 1] + w * (cumulative[k] - cumulative[k - 1]);
  } else if (it == times.end()) {
    at_cut = cumulative.back();
  }
  return (cumulative.back() - at_cut) / total;
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::envelope_gap: return "envelope_gap";
    case Quantity::prox_gap: return "prox_gap";
    case Quantity::grad_norm: return "grad_norm";
    case Quantity::prox_dist: return "prox_dist";
    case Quantity::velocity_norm: return "velocity_norm";
    case Quantity::dist_to_minimizer: return "dist_to_minimizer";
  }
  return "unknown";
}

double quantity_of(const Sample& s, Quantity q) {
  switch (q) {
    case Quantity::envelope_gap: return s.envelope_gap;
    case Quantity::prox_gap: return s.prox_gap;
    case Quantity::grad_norm: return s.grad_norm;
    case Quantity::prox_dist: return s.prox_dist;
    case Quantity::velocity_norm: return s.velocity_norm;
    case Quantity::dist_to_minimizer: return s.dist_to_minimizer;
  }
  return 0.0;
}

RateFit fit_rate(const Trajectory& traj, Quantity q, std::optional<std::pair<double, double>> window) {
  if (traj.empty()) throw InvalidInput("fit_rate: empty trajectory");
  const double t_end = traj.back().t;
  const auto [lo, hi] = window.value_or(std::make_pair(t_end / 10.0, t_end));
  if (!(lo < hi)) throw InvalidInput(fmt::format("fit_rate: empty window [{}, {}]", lo, hi));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> pts;
  const double slack = 1e-12 * hi;
  for (const Sample& s : traj.samples) {
    if (s.t < lo - slack || s.t > hi + slack) continue;
    const double value = quantity_of(s, q);
    if (!(value > 1e-14) || !std::isfinite(value)) continue;
    pts.emplace_back(std::log(s.t), std::log(value));
  }
  if (pts.size() < 10) {
    throw InvalidInput(fmt::format("fit_rate: {} usable samples of {} in [{}, {}], need 10",
                                   pts.size(), to_string(q), lo, hi));
  }
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double count = static_cast<double>(pts.size());
  const double mx = sx / count;
  const double my = sy / count;
  double syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.t_lo = lo;
  fit.t_hi = hi;
  fit.samples_used = static_cast<int>(pts.size());
  return fit;
}

MonotonicityReport energy_monotonicity_report(const SystemConfig& cfg, const Trajectory& traj,
                                              double c) {
  MonotonicityReport report;
  double previous = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Sample& s = traj.samples[k];
    const double current = energy(cfg, s.t, s.x, s.v, c);
    if (k > 0) {
      const double uphill = (current - previous) / std::max(1.0, previous);
      if (uphill > report.max_uphill) {
        report.max_uphill = uphill;
        report.at_time = s.t;
      }
    }
    previous = current;
  }
  report.pass = report.max_uphill <= 1e-6;
  return report;
}

}  // namespace imdyn
