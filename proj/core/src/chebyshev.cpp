#include "imdyn/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imdyn/errors.hpp"

namespace imdyn {

ChebyshevGrid::ChebyshevGrid(int size) {
  if (size < 3) throw InvalidInput("Chebyshev grid needs at least 3 nodes");
  const int n = size;
  const int deg = n - 1;
  nodes_.resize(n);
  for (int j = 0; j < n; ++j) nodes_[j] = -std::cos(std::numbers::pi * j / deg);

  // Barycentric weights (-1)^j delta_j; the ordering flip only changes the
  // overall sign, which cancels in the ratios below.
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == deg) ? 0.5 : 1.0);
  diff_.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      diff_(i, j) = (w[j] / w[i]) / (nodes_[i] - nodes_[j]);
      row += diff_(i, j);
    }
    diff_(i, i) = -row;
  }

  integ_.resize(n, n);
  for (int col = 0; col < n; ++col) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[col] = 1.0;
    const Eigen::VectorXd a = coefficients(e);
    // Antiderivative coefficients, degree deg + 1.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    auto coef = [&](int k) { return k <= deg ? a[k] : 0.0; };
    b[1] = coef(0) - 0.5 * coef(2);
    for (int k = 2; k <= deg + 1; ++k) b[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k);
    auto evaluate = [&](double x) {
      const double theta = std::acos(std::clamp(x, -1.0, 1.0));
      double s = 0.0;
      for (int k = 1; k <= deg + 1; ++k) s += b[k] * std::cos(k * theta);
      return s;
    };
    const double at_left = evaluate(-1.0);
    for (int j = 0; j < n; ++j) integ_(j, col) = evaluate(nodes_[j]) - at_left;
  }
}

Eigen::VectorXd ChebyshevGrid::coefficients(const Eigen::VectorXd& values) const {
  const int n = size();
  const int deg = n - 1;
  Eigen::VectorXd a(n);
  for (int k = 0; k <= deg; ++k) {
    double s = 0.0;
    // Node j (ascending) sits at angle pi * (deg - j) / deg.
    for (int j = 0; j <= deg; ++j) {
      const double term = values[j] * std::cos(std::numbers::pi * k * (deg - j) / deg);
      s += (j == 0 || j == deg) ? 0.5 * term : term;
    }
    a[k] = 2.0 * s / deg;
  }
  a[0] *= 0.5;
  a[deg] *= 0.5;
  return a;
}

}  // namespace imdyn
