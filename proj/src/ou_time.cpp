#include "pchaos/ou_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pchaos/quadrature.hpp"

namespace pchaos {

OUTime::OUTime(double lambda, double horizon, double depth, bool printed_form)
    : lambda_(lambda), t_(horizon), l_(depth) {
  if (!(lambda > 0.0) || !(horizon > 0.0) || !(depth >= 0.0))
    throw std::invalid_argument("OU kernel needs lambda > 0, T > 0, L >= 0");
  c0_ = printed_form ? -std::expm1(-2.0 * t_) : -std::expm1(-2.0 * lambda_ * t_);
}

double OUTime::w_hat(double m) const {
  if (m <= 0.0) return c0_ * std::exp(2.0 * lambda_ * m);
  return -std::expm1(-2.0 * lambda_ * (t_ - m));
}

double OUTime::phi(double x, double y) const {
  if (!inside(x) || !inside(y)) return 0.0;
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  return w_hat(hi) * std::exp(-lambda_ * (hi - lo)) / t_;
}

double OUTime::diag(double x) const { return inside(x) ? w_hat(x) / t_ : 0.0; }

double OUTime::w_hat_integral(double p, double q) const {
  p = std::max(p, -l_);
  q = std::min(q, t_);
  if (!(q > p)) return 0.0;
  const double k = 2.0 * lambda_;
  double out = 0.0;
  if (p < 0.0) {
    const double hi = std::min(q, 0.0);
    out += c0_ * (std::exp(k * hi) - std::exp(k * p)) / k;
  }
  if (q > 0.0) {
    const double lo = std::max(p, 0.0);
    out += (q - lo) - std::exp(-k * (t_ - q)) * -std::expm1(-k * (q - lo)) / k;
  }
  return out;
}

double OUTime::w_hat_sq_weighted(double p, double q, double b) const {
  const double k = 2.0 * lambda_;
  double out = 0.0;
  if (p < 0.0) {
    const double hi = std::min(q, 0.0);
    out += c0_ * c0_ * (std::exp(k * (hi + b)) - std::exp(k * (p + b))) / k;
  }
  if (q > 0.0) {
    const double lo = std::max(p, 0.0);
    const double len = q - lo;
    out += std::exp(-k * (lo - b)) * -std::expm1(-k * len) / k;
    out -= 2.0 * std::exp(-k * (t_ - b)) * len;
    out += std::exp(-k * (2.0 * t_ - q - b)) * -std::expm1(-k * len) / k;
  }
  return out;
}

double OUTime::w_hat_weighted(double p, double q, double x) const {
  const double k = lambda_;
  double out = 0.0;
  if (p < 0.0) {
    const double hi = std::min(q, 0.0);
    out += c0_ * (std::exp(k * (hi + x)) - std::exp(k * (p + x))) / k;
  }
  if (q > 0.0) {
    const double lo = std::max(p, 0.0);
    const double len = q - lo;
    out += std::exp(-k * (lo - x)) * -std::expm1(-k * len) / k;
    out -= std::exp(-k * (2.0 * t_ - q - x)) * -std::expm1(-k * len) / k;
  }
  return out;
}

double OUTime::psi(double x) const {
  if (!inside(x)) return 0.0;
  const double past = w_hat(x) * -std::expm1(-lambda_ * (x + l_)) / lambda_;
  return (past + w_hat_weighted(x, t_, x)) / t_;
}

double OUTime::q(double a, double b) const {
  if (!inside(a) || !inside(b)) return 0.0;
  if (a > b) std::swap(a, b);
  const double k = 2.0 * lambda_;
  const double decay = std::exp(lambda_ * (a - b));
  const double wb = w_hat(b);
  const double term1 = w_hat(a) * wb * decay * -std::expm1(-k * (a + l_)) / k;
  const double term2 = wb * decay * w_hat_integral(a, b);
  const double term3 = decay * w_hat_sq_weighted(b, t_, b);
  return (term1 + term2 + term3) / (t_ * t_);
}

double OUTime::phi_integral() const {
  const std::vector<double> b = breaks();
  return integrate_value([&](double x) { return psi(x); }, -l_, t_, 1e-12, b);
}

double OUTime::phi_sq_integral() const {
  // int int phi^2 = 2 int_{y} int_{x<y} + diagonal (measure zero).
  // Inner integral over x < y of phi(x,y)^2 = T^{-2} w_hat(y)^2 (1 - e^{-2 lambda (y+L)}) / (2 lambda).
  auto inner = [&](double y) {
    const double wy = w_hat(y);
    return wy * wy * -std::expm1(-2.0 * lambda_ * (y + l_)) / (2.0 * lambda_);
  };
  const std::vector<double> b = breaks();
  return 2.0 * integrate_value(inner, -l_, t_, 1e-13, b) / (t_ * t_);
}

double OUTime::phi_sq_integral_quadrature(double rel_tol) const {
  const std::vector<double> b = breaks();
  return integrate_value([&](double y) { return s(y); }, -l_, t_, rel_tol, b);
}

double OUTime::s_sq_integral(double rel_tol) const {
  const std::vector<double> b = breaks();
  return integrate_value([&](double y) { const double v = s(y); return v * v; }, -l_, t_, rel_tol, b);
}

double OUTime::q_sq_integral(double rel_tol) const {
  auto outer = [&](double b) {
    std::vector<double> br{0.0};
    auto inner = [&](double a) { const double v = q(a, b); return v * v; };
    return integrate_value(inner, -l_, b, rel_tol, br);
  };
  const std::vector<double> b = breaks();
  return 2.0 * integrate_value(outer, -l_, t_, rel_tol, b);
}

double OUTime::phi_pow_integral(double p, double rel_tol) const {
  auto outer = [&](double y) {
    const double wy = std::pow(w_hat(y), p);
    // int_{-L}^{y} e^{-p lambda (y - x)} dx
    return wy * -std::expm1(-p * lambda_ * (y + l_)) / (p * lambda_);
  };
  const std::vector<double> b = breaks();
  return 2.0 * integrate_value(outer, -l_, t_, rel_tol, b) / std::pow(t_, p);
}

double OUTime::phi4_root_integral(double rel_tol) const {
  auto outer = [&](double y) {
    // int_x phi(x, y)^4 dx = x<y part + x>y part
    const double wy = w_hat(y);
    const double before = std::pow(wy, 4) * -std::expm1(-4.0 * lambda_ * (y + l_)) / (4.0 * lambda_);
    std::vector<double> br{0.0};
    const double after = integrate_value(
        [&](double x) { return std::pow(w_hat(x), 4) * std::exp(-4.0 * lambda_ * (x - y)); }, y, t_, rel_tol, br);
    return std::sqrt(before + after) / (t_ * t_);
  };
  const std::vector<double> b = breaks();
  return integrate_value(outer, -l_, t_, rel_tol, b);
}

double OUTime::truncation_tail() const {
  // Mass of phi^2 over the region where at least one coordinate lies
  // below -L, for the same kernel extended to the infinite past.
  const double k = 2.0 * lambda_;
  const double both = c0_ * c0_ * std::exp(-2.0 * k * l_) / (k * k);
  const double one_side = 2.0 * w_hat_sq_weighted(-l_, t_, -l_) / k;
  return (both + one_side) / (t_ * t_);
}

}  // namespace pchaos
