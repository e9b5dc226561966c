#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pchaos/kernels.hpp"
#include "pchaos/point_process.hpp"

namespace pchaos {

class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Y_t = sqrt(2 lambda) int_{-L}^t int u e^{-lambda (t - x)} N(du, dx) on [0, T].
struct OUConfig {
  double lambda = 1.0;
  ControlMeasure control;
  double horizon = 1.0;
  double depth = 12.0;
  bool printed_form = false;

  // Validates int u^2 nu = 1 (to 1e-10), int |u|^3 nu < inf and
  // e^{-2 lambda L} < 1e-10; L defaults to 12 / lambda.
  static OUConfig make(double lambda, ControlMeasure control, double horizon, std::optional<double> depth = {},
                       bool printed_form = false);

  Window window() const;
  double c_nu_sq() const;  // int u^4 nu(du)
};

PointPattern sample_ou_pattern(const OUConfig& cfg, std::uint64_t seed);

std::vector<double> ou_path(const OUConfig& cfg, const PointPattern& pattern, std::span<const double> times);
std::vector<double> simulate_ou_path(const OUConfig& cfg, std::uint64_t seed, std::span<const double> times);

// Exact int_0^T Y_t dt and int_0^T Y_t^2 dt of the path carried by `pattern`.
struct PathIntegrals {
  double linear = 0.0;
  double square = 0.0;
};
PathIntegrals ou_path_integrals(const OUConfig& cfg, const PointPattern& pattern);
// Trapezoid approximation of int_0^T Y_t^2 dt on `steps` equal steps.
double ou_path_square_trapezoid(const OUConfig& cfg, const PointPattern& pattern, std::size_t steps);

Kernel ou_single_kernel(const OUConfig& cfg);
Kernel ou_double_kernel(const OUConfig& cfg);  // sqrt(T) H
Kernel ou_diag_kernel(const OUConfig& cfg);    // sqrt(T) H*

// T^{-1/2} int_0^T Y_t dt as I1 of the single kernel.
double ou_linear_stat(const OUConfig& cfg, const PointPattern& pattern);
double ou_linear_stat(const OUConfig& cfg, std::uint64_t seed);

struct QuadraticStat {
  double k2 = 0.0;
  double k1 = 0.0;
  double total = 0.0;
};
QuadraticStat ou_quadratic_stat(const OUConfig& cfg, const PointPattern& pattern);
QuadraticStat ou_quadratic_stat(const OUConfig& cfg, std::uint64_t seed);

struct SampleVarianceStat {
  double value = 0.0;
  double correction = 0.0;  // T^{-1/2} (linear stat)^2
};
SampleVarianceStat ou_sample_variance_stat(const OUConfig& cfg, const PointPattern& pattern);
SampleVarianceStat ou_sample_variance_stat(const OUConfig& cfg, std::uint64_t seed);

// Finite-T variance of the linear statistic for the past truncated at -L
// (L = inf gives the stationary value).
double linear_stat_variance(double lambda, double horizon, double depth = kInf);
// Exact variances of K2 and K1 for the configuration.
double k2_variance(const OUConfig& cfg);
double k1_variance(const OUConfig& cfg);

}  // namespace pchaos
