#include "imdyn/riccati.hpp"

#include <cmath>
#include <complex>

namespace imdyn {

std::optional<RiccatiStep> riccati_step(const ChebyshevGrid& grid, double ta, double tb,
                                        const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                        double u, double du, double tol, int max_iterations) {
  using Complex = std::complex<double>;
  using CVector = Eigen::VectorXcd;
  const int n = grid.size();
  const double half = 0.5 * (tb - ta);

  CVector r(n);
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    const double disc = q[j] - 0.25 * p[j] * p[j];
    if (!(disc > 0.0)) return std::nullopt;
    r[j] = Complex(-0.5 * p[j], std::sqrt(disc));
    scale = std::max(scale, std::abs(q[j]));
  }

  const Eigen::MatrixXd d = grid.differentiation() / half;
  RiccatiStep out;
  bool converged = false;
  for (int it = 0; it <= max_iterations; ++it) {
    const CVector dr = d * r;
    CVector residual(n);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      residual[j] = dr[j] + r[j] * r[j] + p[j] * r[j] + q[j];
      worst = std::max(worst, std::abs(residual[j]));
    }
    if (!std::isfinite(worst)) return std::nullopt;
    out.iterations = it;
    if (worst <= tol * scale) {
      converged = true;
      break;
    }
    for (int j = 0; j < n; ++j) r[j] -= residual[j] / (2.0 * r[j] + p[j]);
  }
  if (!converged) return std::nullopt;

  // The phase derivative must be resolved by the grid, not just collocated.
  const Eigen::VectorXd im_coeffs = grid.coefficients(r.imag());
  const double head = im_coeffs.cwiseAbs().maxCoeff();
  const double tail = std::max(std::abs(im_coeffs[n - 1]), std::abs(im_coeffs[n - 2]));
  if (!(tail <= 1e-12 * head)) return std::nullopt;

  const Eigen::VectorXd z_re = half * (grid.integration() * r.real());
  const Eigen::VectorXd z_im = half * (grid.integration() * r.imag());

  // u = Re(C e^z): Re C = u(ta), Re(C r(ta)) = u'(ta).
  const Complex ra = r[0];
  const Complex c(u, (u * ra.real() - du) / ra.imag());
  const Complex eb = std::exp(Complex(z_re[n - 1], z_im[n - 1]));
  out.u = (c * eb).real();
  out.du = (c * r[n - 1] * eb).real();
  out.envelope.resize(n);
  const double c_abs = std::abs(c);
  for (int j = 0; j < n; ++j) out.envelope[j] = c_abs * std::exp(z_re[j]);
  if (!std::isfinite(out.u) || !std::isfinite(out.du)) return std::nullopt;
  return out;
}

}  // namespace imdyn
