#pragma once

#include <Eigen/Core>

namespace imdyn {

/// Chebyshev-Lobatto grid on [-1, 1] (ascending) with spectral
/// differentiation and indefinite-integration matrices.
class ChebyshevGrid {
 public:
  explicit ChebyshevGrid(int size);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  /// (D f)_j = f'(x_j) for the interpolant of f.
  const Eigen::MatrixXd& differentiation() const { return diff_; }
  /// (Q f)_j = integral of the interpolant of f from -1 to x_j.
  const Eigen::MatrixXd& integration() const { return integ_; }
  /// Coefficients a_k of f = sum_k a_k T_k from nodal values.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& values) const;

 private:
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd diff_;
  Eigen::MatrixXd integ_;
};

}  // namespace imdyn
