#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pchaos/point_process.hpp"

namespace pchaos {

// k(t, x) = 1{|t - x| <= tau}
struct HazardRect {
  double tau = 1.0;
};
// k(t, x) = 1{0 <= x <= t}
struct HazardDL {};
// k(t, x) = sqrt(2 lambda) e^{-lambda (t - x)} 1{0 <= x <= t}
struct HazardOU {
  double lambda = 1.0;
};

using HazardKernel = std::variant<HazardRect, HazardDL, HazardOU>;

double hazard_kernel(const HazardKernel& k, double t, double x);
// int_0^T k(s, x) ds
double hazard_kernel_integral(const HazardKernel& k, double x, double horizon);
// int_0^T k(s, x) k(s, y) ds
double hazard_pair_integral(const HazardKernel& k, double x, double y, double horizon);
std::string describe(const HazardKernel& k);

struct HazardModel {
  HazardKernel kernel;
  ControlMeasure control;
  double horizon = 1.0;

  // Validates nonnegative jump support and kernel parameters.
  static HazardModel make(HazardKernel kernel, ControlMeasure control, double horizon);
  // Region of atoms that influence h on [0, T].
  Window window() const;
};

PointPattern sample_hazard_pattern(const HazardModel& model, std::uint64_t seed);

// h(t) = sum_i u_i k(t, x_i) at each requested time.
std::vector<double> hazard_path(const HazardModel& model, const PointPattern& pattern, std::span<const double> times);
std::vector<double> simulate_hazard(const HazardModel& model, std::uint64_t seed, std::span<const double> times);

// H(T) = int_0^T h(s) ds.
double cumulative_hazard(const HazardModel& model, const PointPattern& pattern, double horizon);
double cumulative_hazard(const HazardModel& model, std::uint64_t seed, double horizon);
// int_0^T h(s)^2 ds as an exact double sum over atom pairs.
double hazard_square_integral(const HazardModel& model, const PointPattern& pattern, double horizon);
// Trapezoid approximations on `steps` equal steps over [0, T].
double cumulative_hazard_trapezoid(const HazardModel& model, const PointPattern& pattern, double horizon,
                                   std::size_t steps);
double hazard_square_trapezoid(const HazardModel& model, const PointPattern& pattern, double horizon,
                               std::size_t steps);

// Campbell formula E h(t) = int int u k(t, x) mu(du, dx).
double hazard_mean(const HazardModel& model, double t);
struct HazardMoments {
  double mean = 0.0;
  double variance = 0.0;
};
// Exact mean and variance of H(T).
HazardMoments cumulative_hazard_moments(const HazardModel& model, double horizon);

enum class Thm7Case { Interior = 1, ExtendedGamma = 2, Beta = 3 };

struct Thm7Spec {
  double centering = 0.0;
  double scale = 1.0;
  double target_variance = 0.0;
};

// Control for case 2: extended Gamma with beta(x) = 1 + x^{1/2}.
ControlMeasure thm7_extended_gamma_control(double epsilon = 1e-4);
// Control for case 3: Beta with c(x) = max(x^{1/2}, 1).
ControlMeasure thm7_beta_control(double epsilon = 1e-4);

Thm7Spec thm7_spec(const HazardModel& model, Thm7Case which);
double thm7_stat(const HazardModel& model, Thm7Case which, const PointPattern& pattern);
double thm7_stat(const HazardModel& model, Thm7Case which, std::uint64_t seed);

enum class Thm8Variant { Raw, Centered };

struct Thm8Constants {
  double centering = 0.0;
  double c1 = 0.0;          // raw variance, corrected constant
  double c1_printed = 0.0;  // raw variance as printed
  double c2 = 0.0;          // centered variance
};
Thm8Constants thm8_constants(const HazardModel& model);
double thm8_stat(const HazardModel& model, Thm8Variant variant, const PointPattern& pattern);
double thm8_stat(const HazardModel& model, Thm8Variant variant, std::uint64_t seed);

}  // namespace pchaos
