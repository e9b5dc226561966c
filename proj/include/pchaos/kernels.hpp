#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "pchaos/point_process.hpp"

namespace pchaos {

// Rectangular partition of a window of Z into jump bins times time bins.
// Cell index c = jump_bin * time_bins() + time_bin.
struct Partition {
  std::vector<double> jump_edges{-kInf, kInf};
  std::vector<double> time_edges;

  static Partition time_only(std::vector<double> time_edges);
  static Partition uniform_time(double lo, double hi, std::size_t bins);

  std::size_t jump_bins() const { return jump_edges.size() - 1; }
  std::size_t time_bins() const { return time_edges.size() - 1; }
  std::size_t cells() const { return jump_bins() * time_bins(); }
  std::optional<std::size_t> locate(const Atom& a) const;
  Window cell(std::size_t c) const;
  Window bounds() const;
  void validate() const;
};

// Cell-constant kernel of arity 1 (values[c]) or 2 (values[c * cells + d]),
// carrying the control mass of every cell.
struct GridKernel {
  Partition partition;
  std::vector<double> masses;
  std::vector<double> values;
  int arity = 2;

  std::size_t cells() const { return masses.size(); }
  double at(std::size_t c) const { return values[c]; }
  double at(std::size_t c, std::size_t d) const { return values[c * cells() + d]; }
};

// amplitude * sum_j 1{x, y both in block j}, blocks [origin + j len, origin + (j+1) len).
struct BlockKernel {
  int blocks = 1;
  double origin = 0.0;
  double block_length = 1.0;
  double amplitude = 1.0;
};

// amplitude * sum_j 1{x in block j}.
struct BlockFunction {
  int blocks = 1;
  double origin = 0.0;
  double block_length = 1.0;
  double amplitude = 1.0;
};

// u (2 lambda / T)^{1/2} int_{max(x,0)}^T e^{-lambda (t - x)} dt on [-L, T].
struct OUSingle {
  double lambda = 1.0;
  double horizon = 1.0;
  double depth = 12.0;
};

// u u' phi(x, x') with phi from OUTime.
struct OUDoubleH {
  double lambda = 1.0;
  double horizon = 1.0;
  double depth = 12.0;
  bool printed_form = false;
};

// u^2 phi(x, x), the single-integral part of the squared path.
struct OUDiagHstar {
  double lambda = 1.0;
  double horizon = 1.0;
  double depth = 12.0;
  bool printed_form = false;
};

// 2 lambda u u' e^{-lambda (t - x) - lambda (t - x')} on x, x' in [-L, t].
struct OUInstant {
  double lambda = 1.0;
  double time = 0.0;
  double depth = 12.0;
};

// u^k chi(x) on a time interval.
struct Separable1 {
  int u_power = 1;
  std::function<double(double)> time_fn;
  Interval time;
  std::vector<double> breaks;
};

// u^k u'^k phi(x, x') on a time square.
struct Separable2 {
  int u_power = 1;
  std::function<double(double, double)> time_fn;
  Interval time;
  std::vector<double> breaks;
};

struct ZeroKernel {
  int arity = 2;
};

using KernelFamily = std::variant<GridKernel, BlockKernel, BlockFunction, OUSingle, OUDoubleH,
                                  OUDiagHstar, OUInstant, Separable1, Separable2, ZeroKernel>;

class Kernel {
 public:
  Kernel(KernelFamily family, double scale = 1.0);

  const KernelFamily& family() const { return family_; }
  double scale() const { return scale_; }
  int arity() const { return arity_; }
  bool is_zero() const { return scale_ == 0.0 || std::holds_alternative<ZeroKernel>(family_); }
  Kernel scaled(double c) const { return Kernel(family_, scale_ * c); }
  // Bounding window of the support.
  Window support() const;
  std::vector<double> time_breaks() const;

 private:
  KernelFamily family_;
  double scale_;
  int arity_;
};

GridKernel make_grid(Partition partition, std::vector<double> values, int arity,
                     const ControlMeasure& control);
Kernel block_kernel(int n, double block_length = 1.0, double origin = 0.0);
Kernel block_function(int n, double block_length = 1.0, double origin = 0.0);
Kernel zero_kernel(int arity);

double evaluate(const Kernel& k, const Atom& a);
double evaluate(const Kernel& k, const Atom& a, const Atom& b);

Kernel symmetrize(const Kernel& k);

// int |u|^i nu(du) of a homogeneous control.
double abs_moment(const ControlMeasure& control, int i);

double l2_norm_sq(const Kernel& k, const ControlMeasure& control);
// int |k|^p d mu^arity.
double lp_integral(const Kernel& k, double p, const ControlMeasure& control);
// (int |k|^p d mu^arity)^{1/p}.
double lp_norm(const Kernel& k, double p, const ControlMeasure& control);
// int k d mu^arity.
double integral(const Kernel& k, const ControlMeasure& control);
// int k(z, z') mu(dz'), arity 2.
double compensator(const Kernel& k, const Atom& z, const ControlMeasure& control);

struct TruncatedNorm {
  double value = 0.0;  // norm on the truncated window
  double tail = 0.0;   // exact mass beyond the truncation
};
TruncatedNorm l2_norm_sq_with_tail(const Kernel& k, const ControlMeasure& control);

// Masses of the blocks of a block kernel or block function.
std::vector<double> block_masses(int blocks, double origin, double block_length,
                                 const ControlMeasure& control);

void write_grid_csv(std::ostream& values, std::ostream& header, const GridKernel& g);
GridKernel read_grid_csv(std::istream& values, std::istream& header);

}  // namespace pchaos
