#pragma once

#include <vector>

namespace pchaos {

// Time part of the double-integral OU kernel on [-L, T]^2:
//   phi(x, y) = T^{-1} w(max(x, y)) e^{lambda (x + y)},
//   w(m) = C0 for m <= 0, e^{-2 lambda m} - e^{-2 lambda T} for 0 < m <= T,
// with C0 = 1 - e^{-2 lambda T} (or the printed 1 - e^{-2T}). All inner
// integrals are evaluated in closed form through the scaled weight
// w_hat(m) = w(m) e^{2 lambda m}, which stays O(1) on the whole range.
class OUTime {
 public:
  OUTime(double lambda, double horizon, double depth, bool printed_form = false);

  double lambda() const { return lambda_; }
  double horizon() const { return t_; }
  double depth() const { return l_; }
  double c0() const { return c0_; }
  bool inside(double x) const { return x >= -l_ && x <= t_; }
  std::vector<double> breaks() const { return {0.0}; }

  double w_hat(double m) const;
  double phi(double x, double y) const;
  // int phi(x, y) dy over [-L, T].
  double psi(double x) const;
  // int phi(a, y) phi(b, y) dy over [-L, T].
  double q(double a, double b) const;
  double s(double y) const { return q(y, y); }
  // Diagonal phi(x, x) = T^{-1} w_hat(x).
  double diag(double x) const;

  // int w_hat over [p, q].
  double w_hat_integral(double p, double q) const;
  double phi_integral() const;   // int int phi
  double phi_sq_integral() const;  // int int phi^2 = int S, closed form
  double phi_sq_integral_quadrature(double rel_tol = 1e-11) const;
  double s_sq_integral(double rel_tol = 1e-10) const;  // int S^2
  double q_sq_integral(double rel_tol = 1e-8) const;   // int int Q^2
  double phi_pow_integral(double p, double rel_tol = 1e-9) const;  // int int |phi|^p
  // int (int phi(x, y)^4 dx)^{1/2} dy
  double phi4_root_integral(double rel_tol = 1e-8) const;
  // Exact contribution of x < -L to int int phi^2 when the kernel extends
  // to the infinite past.
  double truncation_tail() const;

 private:
  // int_p^q w_hat(y)^2 e^{-2 lambda (y - b)} dy, b <= p.
  double w_hat_sq_weighted(double p, double q, double b) const;
  // int_p^q w_hat(y) e^{-lambda (y - x)} dy, x <= p.
  double w_hat_weighted(double p, double q, double x) const;

  double lambda_;
  double t_;
  double l_;
  double c0_;
};

}  // namespace pchaos
