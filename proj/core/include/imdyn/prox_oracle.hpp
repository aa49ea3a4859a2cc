#pragma once

#include "imdyn/prox.hpp"

namespace imdyn {

/// Independent prox oracle for separable objectives: per coordinate, a
/// 10^5-point grid search over [x_i - 2|x_i| - 10, x_i + 2|x_i| + 10] followed
/// by golden-section refinement to a bracket of width 1e-10. Uses only
/// ProxFunction::coordinate_value, never the closed-form maps.
Vector brute_force_prox(const ProxFunction& f, double lambda, const VectorRef& x);

/// Golden-section minimization of a unimodal `g` on [lo, hi] to bracket width `tol`.
template <class G>
double golden_section_minimize(G&& g, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace imdyn
