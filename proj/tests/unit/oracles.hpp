#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

// Composite Simpson rule on n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

template <class F>
double trapezoid(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Standard error of the sample variance from the fourth central moment.
inline double variance_se(const std::vector<double>& v) {
  const double m = mean(v);
  double s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    s2 += d;
    s4 += d * d;
  }
  const double n = static_cast<double>(v.size());
  s2 /= n;
  s4 /= n;
  return std::sqrt((s4 - s2 * s2) / n);
}

inline double mean_se(const std::vector<double>& v) { return std::sqrt(variance(v) / static_cast<double>(v.size())); }

// Digamma by upward recurrence and the asymptotic series.
inline double digamma(double x) {
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double z = 1.0 / (x * x);
  return acc + std::log(x) - 0.5 / x - z * (1.0 / 12 - z * (1.0 / 120 - z * (1.0 / 252 - z * (1.0 / 240 - z / 132))));
}

inline double poisson_pmf(int k, double m) { return std::exp(k * std::log(m) - m - std::lgamma(k + 1.0)); }

}  // namespace oracle
