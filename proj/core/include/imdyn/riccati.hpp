#pragma once

#include <optional>

#include <Eigen/Core>

#include "imdyn/chebyshev.hpp"

namespace imdyn {

/// Result of one phase-function step for u'' + p(t) u' + q(t) u = 0.
struct RiccatiStep {
  double u = 0.0;   ///< u(tb)
  double du = 0.0;  ///< u'(tb)
  /// Amplitude bound |C| exp(Re z(t_j)) >= |u(t_j)| at each grid node.
  Eigen::VectorXd envelope;
  int iterations = 0;
};

/// Advances an underdamped scalar linear oscillator across [ta, tb] without
/// resolving individual oscillations. The log-derivative r = u'/u solves
/// r' + r^2 + p r + q = 0; starting from the frozen-coefficient root
/// -p/2 + i sqrt(q - p^2/4), defect-correction sweeps
///     r <- r - (r' + r^2 + p r + q) / (2 r + p)
/// are applied on the Chebyshev nodes until the Riccati residual drops below
/// `tol * max|q|`. Real solutions are Re(C exp(int r)).
///
/// `p` and `q` are sampled at the grid nodes mapped onto [ta, tb]. Returns
/// nullopt when the oscillator is not underdamped at some node, the sweeps
/// do not converge, or r is not resolved by the grid.
std::optional<RiccatiStep> riccati_step(const ChebyshevGrid& grid, double ta, double tb,
                                        const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                        double u, double du, double tol = 1e-13,
                                        int max_iterations = 40);

}  // namespace imdyn
