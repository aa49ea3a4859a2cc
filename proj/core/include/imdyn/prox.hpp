#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace imdyn {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Vector>;

enum class ObjectiveKind {
  l1,                 ///< sum_i |x_i|
  elastic_abs,        ///< sum_i |x_i| + x_i^2 / 2
  diag_quadratic,     ///< 1/2 sum_i q_i (x_i - c_i)^2, q_i >= 0
  numeric_separable,  ///< sum_i phi(x_i) for a caller-supplied convex phi
};

std::string_view to_string(ObjectiveKind kind);

/// Scalar convex function used coordinate-wise by the numeric kind. The prox
/// search runs on [bracket_lo, bracket_hi]; `argmin` is a known minimizer of
/// `fn` and must lie in the bracket.
struct ScalarConvexFunction {
  std::function<double(double)> fn;
  double bracket_lo = -1e3;
  double bracket_hi = 1e3;
  double argmin = 0.0;
};

/// On the slab |x_i - center| <= half_width the envelope gradient is
/// gain(lambda) * (x_i - center); `gain_dlambda` is d gain / d lambda.
struct AffinePiece {
  double center = 0.0;
  double half_width = 0.0;
  double gain = 0.0;
  double gain_dlambda = 0.0;
};

/// A proper, convex, separable objective with closed-form (or bracketed
/// numeric) proximal map and a known minimizer. Immutable after construction.
class ProxFunction {
 public:
  static ProxFunction l1(std::size_t dimension);
  static ProxFunction elastic_abs(std::size_t dimension);
  static ProxFunction diag_quadratic(Vector weights, Vector center);
  /// Throws InvalidInput when the three-point midpoint convexity spot check
  /// on the bracket fails or `argmin` lies outside the bracket.
  static ProxFunction numeric_separable(std::size_t dimension, ScalarConvexFunction phi);

  ObjectiveKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  double optimal_value() const { return optimal_value_; }
  const Vector& minimizer() const { return minimizer_; }
  const Vector& weights() const { return weights_; }
  const Vector& center() const { return center_; }

  double value(const VectorRef& x) const;
  /// The i-th separable summand of value().
  double coordinate_value(std::size_t i, double y) const;

  /// Writes prox_{lambda Phi}(x) into `out` (which may alias `x`).
  void prox_into(double lambda, const VectorRef& x, Eigen::Ref<Vector> out) const;

  /// Affine piece of the envelope gradient in coordinate i, or nullopt when
  /// the kind has none (numeric).
  std::optional<AffinePiece> affine_piece(std::size_t i, double lambda) const;

 private:
  ProxFunction() = default;
  void check_dimension(const VectorRef& x) const;
  double numeric_prox(double lambda, double xi) const;

  ObjectiveKind kind_ = ObjectiveKind::l1;
  std::size_t dimension_ = 0;
  double optimal_value_ = 0.0;
  Vector minimizer_;
  Vector weights_;
  Vector center_;
  std::shared_ptr<const ScalarConvexFunction> phi_;
};

/// Moreau envelope data at one point.
struct MoreauEval {
  double envelope_value = 0.0;
  Vector prox_point;
  Vector gradient;
  double lambda = 0.0;
};

double value(const ProxFunction& f, const VectorRef& x);
Vector prox(const ProxFunction& f, double lambda, const VectorRef& x);
MoreauEval moreau(const ProxFunction& f, double lambda, const VectorRef& x);

/// |lambda - mu| * ||grad Phi_lambda(x)|| - ||prox_lambda(x) - prox_mu(x)||,
/// nonnegative up to rounding for every convex Phi.
double prox_comparison_residual(const ProxFunction& f, double lambda, double mu,
                                const VectorRef& x);

}  // namespace imdyn
