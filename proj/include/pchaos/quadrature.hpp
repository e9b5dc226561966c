#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pchaos {

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod over [a, b], split at the interior points of
// `breaks`. Infinite endpoints are accepted.
template <class F>
Quadrature integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                     std::span<const double> breaks = {}, unsigned max_depth = 18) {
  Quadrature out;
  if (!(b > a)) return out;
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin() + 1, pts.end() - 1);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, pts[i], pts[i + 1], max_depth, rel_tol, &err);
    if (!std::isfinite(v)) throw DivergenceError("integral does not converge");
    out.value += v;
    out.error += err;
  }
  return out;
}

template <class F>
double integrate_value(F&& f, double a, double b, double rel_tol = 1e-10,
                       std::span<const double> breaks = {}) {
  return integrate(std::forward<F>(f), a, b, rel_tol, breaks).value;
}

// Evaluates `eval(tol)` at two tolerance levels and reports the relative
// discrepancy between them next to the finer value.
struct TwoLevel {
  double value = 0.0;
  double discrepancy = 0.0;
};

template <class Eval>
TwoLevel two_level(Eval&& eval, double coarse_tol = 1e-6, double fine_tol = 1e-9) {
  const double coarse = eval(coarse_tol);
  const double fine = eval(fine_tol);
  const double scale = std::max(std::abs(fine), std::numeric_limits<double>::min());
  return {fine, std::abs(fine - coarse) / scale};
}

}  // namespace pchaos
