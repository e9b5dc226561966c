#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pchaos {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InfiniteMassError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Half-open interval [lo, hi).
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  double length() const { return hi > lo ? hi - lo : 0.0; }
  bool empty() const { return !(hi > lo); }
  bool bounded() const { return lo > -kInf && hi < kInf; }
  bool contains(double v) const { return v >= lo && v < hi; }
  bool covers(const Interval& o) const { return o.empty() || (lo <= o.lo && o.hi <= hi); }
  Interval intersect(const Interval& o) const {
    return {lo > o.lo ? lo : o.lo, hi < o.hi ? hi : o.hi};
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Atom {
  double u = 0.0;  // jump size
  double x = 0.0;  // time coordinate
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Rectangle of Z: jump axis times time axis.
struct Window {
  Interval jump;
  Interval time;

  bool empty() const { return jump.empty() || time.empty(); }
  bool contains(const Atom& a) const { return jump.contains(a.u) && time.contains(a.x); }
  bool covers(const Window& o) const {
    return o.empty() || (jump.covers(o.jump) && time.covers(o.time));
  }
  Window intersect(const Window& o) const { return {jump.intersect(o.jump), time.intersect(o.time)}; }
  friend bool operator==(const Window&, const Window&) = default;
};

// Time-dependent positive parameter max(offset + coeff * max(x, 0)^power, floor).
struct PowerLaw {
  double offset = 1.0;
  double coeff = 0.0;
  double power = 1.0;
  double floor = 0.0;

  double operator()(double x) const;
  bool constant() const { return coeff == 0.0; }
};

struct DiscreteJumps {
  std::vector<double> sizes;
  std::vector<double> weights;
};

// nu(du) = u^{-1-sigma} e^{-gamma u} du / Gamma(1 - sigma), u > 0.
struct GeneralizedGamma {
  double sigma = 0.5;
  double gamma = 1.0;
};

// nu_x(du) = u^{-1} e^{-beta(x) u} du, u > 0.
struct ExtendedGamma {
  PowerLaw beta;
};

// nu_x(du) = c(x) u^{-1} (1 - u)^{c(x) - 1} du, 0 < u < 1.
struct BetaJumps {
  PowerLaw concentration;
};

using JumpMarginal = std::variant<DiscreteJumps, GeneralizedGamma, ExtendedGamma, BetaJumps>;

// Control measure mu(du, dx) = nu_x(du) dx restricted to jumps |u| >= epsilon
// (infinite-activity marginals) and to the time support.
class ControlMeasure {
 public:
  static ControlMeasure discrete(std::vector<double> sizes, std::vector<double> weights,
                                 Interval time = {});
  static ControlMeasure generalized_gamma(double sigma, double gamma, double epsilon,
                                          Interval time = {});
  static ControlMeasure extended_gamma(PowerLaw beta, double epsilon, Interval time = {0.0, kInf});
  static ControlMeasure beta(PowerLaw concentration, double epsilon, Interval time = {0.0, kInf});

  const JumpMarginal& marginal() const { return marginal_; }
  double epsilon() const { return epsilon_; }
  Interval time_support() const { return time_; }
  // Smallest interval holding every jump size of the (truncated) measure.
  Interval jump_support() const;
  bool homogeneous() const;
  std::string describe() const;

  // nu_x(jump) for the truncated measure.
  double jump_mass(double x, Interval jump) const;
  // int_jump u^i nu_x(du) for the truncated measure.
  double jump_moment(double x, int i, Interval jump) const;
  double jump_moment(double x, int i) const { return jump_moment(x, i, Interval{}); }
  // Density of nu_x with respect to du; continuous marginals only.
  double jump_density(double u, double x) const;
  // Cached moments K^(i), i = 0..6, of a homogeneous truncated marginal.
  double moment(int i) const;
  // Untruncated moments int u^i nu(du), i >= 1.
  double full_moment(double x, int i) const;
  // Moment mass removed by truncation, int_0^epsilon u^i nu_x(du).
  double neglected_moment(double x, int i) const;

 private:
  ControlMeasure(JumpMarginal m, double epsilon, Interval time);
  Interval effective_jump(Interval jump) const;

  JumpMarginal marginal_;
  double epsilon_ = 0.0;
  Interval time_;
  std::array<double, 7> moments_{};
};

struct PointPattern {
  std::vector<Atom> atoms;
  Window window;
  double total_mass = 0.0;
  std::uint64_t seed = 0;
};

double measure_of(const ControlMeasure& control, const Window& region);

PointPattern sample_pattern(const ControlMeasure& control, const Window& window,
                            std::uint64_t seed);

std::size_t count_in(const PointPattern& pattern, const Window& region);

double compensated_count(const PointPattern& pattern, const Window& region,
                         const ControlMeasure& control);

void write_pattern_csv(std::ostream& out, const PointPattern& pattern);
PointPattern read_pattern_csv(std::istream& in);

}  // namespace pchaos
