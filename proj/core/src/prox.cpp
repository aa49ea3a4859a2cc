#include "imdyn/prox.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "imdyn/errors.hpp"

namespace imdyn {
namespace {

double soft_threshold(double x, double tau) {
  const double shrunk = std::abs(x) - tau;
  return shrunk > 0.0 ? std::copysign(shrunk, x) : 0.0;
}

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput(fmt::format("Moreau parameter must be positive, got {}", lambda));
  }
}

// Brent stops near sqrt(eps) because it compares raw function values. When the
// objective is smooth around y, the vertex of a least-squares parabola on
// [y - 1e-5, y + 1e-5] locates the minimum far more precisely. Objectives
// differenced against g(y) keep the fitted values small.
template <class G>
double refine_smooth_minimum(G&& g, double y) {
  constexpr int points = 41;
  constexpr double half_window = 1e-5;
  const double gy = g(y);
  Eigen::Matrix<double, points, 3> design;
  Eigen::Matrix<double, points, 1> values;
  for (int k = 0; k < points; ++k) {
    const double s = -1.0 + 2.0 * k / (points - 1);
    design.row(k) << 1.0, s, s * s;
    values[k] = g(y + half_window * s) - gy;
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(values);
  const double residual = (design * c - values).cwiseAbs().maxCoeff();
  if (!(c[2] > 0.0) || residual > 1e-13 * (1.0 + std::abs(gy))) return y;
  const double vertex = -c[1] / (2.0 * c[2]);
  return std::abs(vertex) < 1.0 ? y + half_window * vertex : y;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::l1: return "l1";
    case ObjectiveKind::elastic_abs: return "elastic_abs";
    case ObjectiveKind::diag_quadratic: return "diag_quadratic";
    case ObjectiveKind::numeric_separable: return "numeric_separable";
  }
  return "unknown";
}

ProxFunction ProxFunction::l1(std::size_t dimension) {
  if (dimension == 0) throw InvalidInput("objective dimension must be positive");
  ProxFunction f;
  f.kind_ = ObjectiveKind::l1;
  f.dimension_ = dimension;
  f.minimizer_ = Vector::Zero(static_cast<Eigen::Index>(dimension));
  f.optimal_value_ = 0.0;
  return f;
}

ProxFunction ProxFunction::elastic_abs(std::size_t dimension) {
  ProxFunction f = l1(dimension);
  f.kind_ = ObjectiveKind::elastic_abs;
  return f;
}

ProxFunction ProxFunction::diag_quadratic(Vector weights, Vector center) {
  if (weights.size() == 0) throw InvalidInput("objective dimension must be positive");
  if (weights.size() != center.size()) {
    throw InvalidInput(fmt::format("diag_quadratic: {} weights but {} center coordinates",
                                   weights.size(), center.size()));
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw InvalidInput(fmt::format("diag_quadratic: weight {} is {}, must be >= 0", i, weights[i]));
    }
  }
  ProxFunction f;
  f.kind_ = ObjectiveKind::diag_quadratic;
  f.dimension_ = static_cast<std::size_t>(weights.size());
  f.minimizer_ = center;
  f.optimal_value_ = 0.0;
  f.weights_ = std::move(weights);
  f.center_ = std::move(center);
  return f;
}

ProxFunction ProxFunction::numeric_separable(std::size_t dimension, ScalarConvexFunction phi) {
  if (dimension == 0) throw InvalidInput("objective dimension must be positive");
  if (!phi.fn) throw InvalidInput("numeric_separable: empty function handle");
  if (!(phi.bracket_lo < phi.bracket_hi)) throw InvalidInput("numeric_separable: empty bracket");
  if (phi.argmin < phi.bracket_lo || phi.argmin > phi.bracket_hi) {
    throw InvalidInput("numeric_separable: argmin outside the search bracket");
  }
  // Midpoint convexity spot check on three pairs spanning the bracket.
  const double lo = phi.bracket_lo;
  const double hi = phi.bracket_hi;
  const double pairs[3][2] = {{lo, hi}, {lo, 0.5 * (lo + hi)}, {0.5 * (lo + hi), hi}};
  for (const auto& p : pairs) {
    const double mid = phi.fn(0.5 * (p[0] + p[1]));
    const double chord = 0.5 * (phi.fn(p[0]) + phi.fn(p[1]));
    if (mid > chord + 1e-12 * (1.0 + std::abs(chord))) {
      throw InvalidInput(fmt::format(
          "numeric_separable: midpoint convexity fails on [{}, {}]", p[0], p[1]));
    }
  }
  ProxFunction f;
  f.kind_ = ObjectiveKind::numeric_separable;
  f.dimension_ = dimension;
  f.minimizer_ = Vector::Constant(static_cast<Eigen::Index>(dimension), phi.argmin);
  f.optimal_value_ = static_cast<double>(dimension) * phi.fn(phi.argmin);
  f.phi_ = std::make_shared<const ScalarConvexFunction>(std::move(phi));
  return f;
}

void ProxFunction::check_dimension(const VectorRef& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) {
    throw InvalidInput(
        fmt::format("dimension mismatch: objective has {}, argument has {}", dimension_, x.size()));
  }
}

double ProxFunction::coordinate_value(std::size_t i, double y) const {
  switch (kind_) {
    case ObjectiveKind::l1:
      return std::abs(y);
    case ObjectiveKind::elastic_abs:
      return std::abs(y) + 0.5 * y * y;
    case ObjectiveKind::diag_quadratic: {
      const auto k = static_cast<Eigen::Index>(i);
      const double d = y - center_[k];
      return 0.5 * weights_[k] * d * d;
    }
    case ObjectiveKind::numeric_separable:
      return phi_->fn(y);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ProxFunction::value(const VectorRef& x) const {
  check_dimension(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    sum += coordinate_value(i, x[static_cast<Eigen::Index>(i)]);
  }
  return sum;
}

double ProxFunction::numeric_prox(double lambda, double xi) const {
  const auto& phi = *phi_;
  auto objective = [&](double y) {
    const double d = xi - y;
    return phi.fn(y) + d * d / (2.0 * lambda);
  };
  constexpr int bits = std::numeric_limits<double>::digits / 2;
  const auto [y, fy] =
      boost::math::tools::brent_find_minima(objective, phi.bracket_lo, phi.bracket_hi, bits);
  (void)fy;
  const double edge_tol = 1e-7 * (1.0 + phi.bracket_hi - phi.bracket_lo);
  if (y - phi.bracket_lo < edge_tol || phi.bracket_hi - y < edge_tol) {
    throw SearchFailure(fmt::format(
        "numeric prox: minimizer for x = {} and lambda = {} is not inside [{}, {}]", xi, lambda,
        phi.bracket_lo, phi.bracket_hi));
  }
  return refine_smooth_minimum(objective, y);
}

void ProxFunction::prox_into(double lambda, const VectorRef& x, Eigen::Ref<Vector> out) const {
  require_positive_lambda(lambda);
  check_dimension(x);
  if (out.size() != x.size()) throw InvalidInput("prox output has the wrong size");
  switch (kind_) {
    case ObjectiveKind::l1:
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = soft_threshold(x[i], lambda);
      break;
    case ObjectiveKind::elastic_abs:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        out[i] = soft_threshold(x[i], lambda) / (1.0 + lambda);
      }
      break;
    case ObjectiveKind::diag_quadratic:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double lq = lambda * weights_[i];
        out[i] = (x[i] + lq * center_[i]) / (1.0 + lq);
      }
      break;
    case ObjectiveKind::numeric_separable:
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = numeric_prox(lambda, x[i]);
      break;
  }
}

std::optional<AffinePiece> ProxFunction::affine_piece(std::size_t i, double lambda) const {
  require_positive_lambda(lambda);
  switch (kind_) {
    case ObjectiveKind::l1:
    case ObjectiveKind::elastic_abs:
      // |x| <= lambda: the soft threshold is zero, so grad = x / lambda.
      return AffinePiece{0.0, lambda, 1.0 / lambda, -1.0 / (lambda * lambda)};
    case ObjectiveKind::diag_quadratic: {
      const auto k = static_cast<Eigen::Index>(i);
      const double q = weights_[k];
      const double den = 1.0 + lambda * q;
      return AffinePiece{center_[k], std::numeric_limits<double>::infinity(), q / den,
                         -q * q / (den * den)};
    }
    case ObjectiveKind::numeric_separable:
      return std::nullopt;
  }
  return std::nullopt;
}

double value(const ProxFunction& f, const VectorRef& x) { return f.value(x); }

Vector prox(const ProxFunction& f, double lambda, const VectorRef& x) {
  Vector out(x.size());
  f.prox_into(lambda, x, out);
  return out;
}

MoreauEval moreau(const ProxFunction& f, double lambda, const VectorRef& x) {
  MoreauEval e;
  e.lambda = lambda;
  e.prox_point = prox(f, lambda, x);
  const Vector diff = x - e.prox_point;
  e.gradient = diff / lambda;
  e.envelope_value = f.value(e.prox_point) + diff.squaredNorm() / (2.0 * lambda);
  return e;
}

double prox_comparison_residual(const ProxFunction& f, double lambda, double mu,
                                const VectorRef& x) {
  require_positive_lambda(mu);
  const MoreauEval at_lambda = moreau(f, lambda, x);
  const Vector at_mu = prox(f, mu, x);
  return std::abs(lambda - mu) * at_lambda.gradient.norm() - (at_lambda.prox_point - at_mu).norm();
}

}  // namespace imdyn
