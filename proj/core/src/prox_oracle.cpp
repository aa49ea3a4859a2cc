#include "imdyn/prox_oracle.hpp"

#include <cmath>

#include <Eigen/Dense>

#include <fmt/format.h>

#include "imdyn/errors.hpp"

namespace imdyn {

Vector brute_force_prox(const ProxFunction& f, double lambda, const VectorRef& x) {
  if (static_cast<std::size_t>(x.size()) != f.dimension()) {
    throw InvalidInput(fmt::format("dimension mismatch: objective has {}, argument has {}",
                                   f.dimension(), x.size()));
  }
  if (!(lambda > 0.0)) throw InvalidInput("Moreau parameter must be positive");

  constexpr int grid_points = 100000;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const auto coord = static_cast<std::size_t>(i);
    auto g = [&](double y) {
      const double d = xi - y;
      return f.coordinate_value(coord, y) + d * d / (2.0 * lambda);
    };
    const double lo = xi - 2.0 * std::abs(xi) - 10.0;
    const double hi = xi + 2.0 * std::abs(xi) + 10.0;
    const double step = (hi - lo) / (grid_points - 1);
    int best = 0;
    double best_val = g(lo);
    for (int k = 1; k < grid_points; ++k) {
      const double v = g(lo + step * k);
      if (v < best_val) {
        best_val = v;
        best = k;
      }
    }
    // Refine on the objective minus its value at the best grid point, written
    // so that the quadratic part is a product of small differences. Comparing
    // absolute values would stall at sqrt(eps * |g|) near the flat minimum.
    const double center = lo + step * best;
    const double phi_center = f.coordinate_value(coord, center);
    auto shifted = [&](double y) {
      return (f.coordinate_value(coord, y) - phi_center) +
             (y - center) * (y + center - 2.0 * xi) / (2.0 * lambda);
    };
    double y = golden_section_minimize(shifted, center - step, center + step, 1e-10);

    // Golden section cannot see past the rounding noise of g. Where g is
    // smooth around y a least-squares parabola through 41 points on
    // [y - 1e-5, y + 1e-5] averages that noise out; a kink in the window shows
    // up as a large fit residual and the fit is discarded.
    constexpr int fit_points = 41;
    constexpr double half_window = 1e-5;
    Eigen::MatrixXd design(fit_points, 3);
    Eigen::VectorXd values(fit_points);
    for (int k = 0; k < fit_points; ++k) {
      const double s = -1.0 + 2.0 * k / (fit_points - 1);
      design.row(k) << 1.0, s, s * s;
      values[k] = shifted(y + half_window * s);
    }
    const Eigen::Vector3d c = design.colPivHouseholderQr().solve(values);
    const double residual = (design * c - values).cwiseAbs().maxCoeff();
    const double noise = 1e-13 * (1.0 + std::abs(f.coordinate_value(coord, y)) + xi * xi / lambda);
    if (c[2] > 0.0 && residual <= noise) {
      const double vertex = -c[1] / (2.0 * c[2]);
      if (std::abs(vertex) < 1.0) y += half_window * vertex;
    }
    out[i] = y;
  }
  return out;
}

}  // namespace imdyn
