#include "pchaos/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pchaos/quadrature.hpp"
#include "pchaos/rng.hpp"
#include "overloaded.hpp"

namespace pchaos {

namespace {

// Upper incomplete gamma Gamma(s, z) for s > -1, including s in (-1, 0].
double upper_gamma(double s, double z) {
  if (z == kInf) return 0.0;
  if (s > 0.0) return z == 0.0 ? std::tgamma(s) : boost::math::tgamma(s, z);
  if (s == 0.0) {
    if (z == 0.0) return kInf;
    return boost::math::expint(1, z);
  }
  if (z == 0.0) return kInf;
  return (std::pow(z, s) * std::exp(-z) - boost::math::tgamma(s + 1.0, z)) / -s;
}

// int_a^b u^{i-1-sigma} e^{-gamma u} du, 0 <= a < b <= inf.
double gamma_type_moment(double sigma, double gamma, int i, double a, double b) {
  const double s = i - sigma;
  return std::pow(gamma, -s) * (upper_gamma(s, gamma * a) - upper_gamma(s, gamma * b));
}

// int_e^1 c u^{-1} (1 - u)^{c - 1} du. Below 1/2 the integrand is smooth in
// s = log u; above 1/2 the substitution w = 1 - u gives c sum_k w^{c+k} / (c + k).
double beta_mass_above(double c, double e) {
  if (e >= 1.0) return 0.0;
  double out = 0.0;
  const double m = std::max(e, 0.5);
  if (e < 0.5) {
    auto f = [c](double s) { return c * std::exp((c - 1.0) * std::log1p(-std::exp(s))); };
    out += integrate_value(f, std::log(e), std::log(0.5), 1e-12);
  }
  const double w = 1.0 - m;
  double term = std::pow(w, c), sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double add = term / (c + k);
    sum += add;
    if (add < 1e-17 * sum) break;
    term *= w;
  }
  return out + c * sum;
}

// c int_a^b u^{i-1} (1-u)^{c-1} du, 0 <= a < b <= 1.
double beta_type_moment(double c, int i, double a, double b) {
  if (i >= 1) {
    const double full = c * boost::math::beta(static_cast<double>(i), c);
    const double fb = b >= 1.0 ? 1.0 : boost::math::ibeta(static_cast<double>(i), c, b);
    const double fa = a <= 0.0 ? 0.0 : boost::math::ibeta(static_cast<double>(i), c, a);
    return full * (fb - fa);
  }
  if (a <= 0.0) return kInf;
  return beta_mass_above(c, a) - beta_mass_above(c, b);
}

std::vector<double> kink_points(const PowerLaw& p, Interval t) {
  std::vector<double> out{0.0};
  if (p.coeff != 0.0 && p.power > 0.0) {
    const double r = (p.floor - p.offset) / p.coeff;
    if (r > 0.0) out.push_back(std::pow(r, 1.0 / p.power));
  }
  std::erase_if(out, [&](double v) { return !(v > t.lo && v < t.hi); });
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

double PowerLaw::operator()(double x) const {
  const double base = coeff == 0.0 ? offset : offset + coeff * std::pow(std::max(x, 0.0), power);
  return std::max(base, floor);
}

ControlMeasure::ControlMeasure(JumpMarginal m, double epsilon, Interval time)
    : marginal_(std::move(m)), epsilon_(epsilon), time_(time) {
  moments_.fill(std::numeric_limits<double>::quiet_NaN());
  if (time_.empty()) throw std::invalid_argument("control time support is empty");
  if (homogeneous()) {
    for (int i = 0; i <= 6; ++i) {
      if (i == 0 && !std::holds_alternative<DiscreteJumps>(marginal_) && epsilon_ <= 0.0) {
        moments_[0] = kInf;
        continue;
      }
      moments_[i] = jump_moment(0.0, i);
    }
  }
}

ControlMeasure ControlMeasure::discrete(std::vector<double> sizes, std::vector<double> weights,
                                        Interval time) {
  if (sizes.empty() || sizes.size() != weights.size())
    throw std::invalid_argument("discrete jumps need matching, non-empty sizes and weights");
  for (double w : weights) require_positive(w, "jump weight");
  for (double s : sizes)
    if (!std::isfinite(s)) throw std::invalid_argument("jump size must be finite");
  return ControlMeasure(DiscreteJumps{std::move(sizes), std::move(weights)}, 0.0, time);
}

ControlMeasure ControlMeasure::generalized_gamma(double sigma, double gamma, double epsilon,
                                                 Interval time) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0, 1)");
  require_positive(gamma, "gamma");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  return ControlMeasure(GeneralizedGamma{sigma, gamma}, epsilon, time);
}

ControlMeasure ControlMeasure::extended_gamma(PowerLaw beta, double epsilon, Interval time) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  if (!(beta(std::max(time.lo, 0.0)) > 0.0) || beta.coeff < 0.0)
    throw std::invalid_argument("beta(x) must be positive and nondecreasing");
  return ControlMeasure(ExtendedGamma{beta}, epsilon, time);
}

ControlMeasure ControlMeasure::beta(PowerLaw concentration, double epsilon, Interval time) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
  if (!(concentration(std::max(time.lo, 0.0)) > 0.0) || concentration.coeff < 0.0)
    throw std::invalid_argument("c(x) must be positive and nondecreasing");
  return ControlMeasure(BetaJumps{concentration}, epsilon, time);
}

bool ControlMeasure::homogeneous() const {
  return std::visit(Overloaded{[](const DiscreteJumps&) { return true; },
                               [](const GeneralizedGamma&) { return true; },
                               [](const ExtendedGamma& e) { return e.beta.constant(); },
                               [](const BetaJumps& b) { return b.concentration.constant(); }},
                    marginal_);
}

std::string ControlMeasure::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  std::visit(Overloaded{[&](const DiscreteJumps& d) {
                          os << "discrete(";
                          for (std::size_t k = 0; k < d.sizes.size(); ++k)
                            os << (k ? ";" : "") << d.sizes[k] << ":" << d.weights[k];
                          os << ")";
                        },
                        [&](const GeneralizedGamma& g) {
                          os << "generalized_gamma(sigma=" << g.sigma << ",gamma=" << g.gamma << ")";
                        },
                        [&](const ExtendedGamma& e) {
                          os << "extended_gamma(beta=" << e.beta.offset << "+" << e.beta.coeff
                             << "x^" << e.beta.power << "|" << e.beta.floor << ")";
                        },
                        [&](const BetaJumps& b) {
                          os << "beta(c=" << b.concentration.offset << "+" << b.concentration.coeff
                             << "x^" << b.concentration.power << "|" << b.concentration.floor << ")";
                        }},
             marginal_);
  os << " eps=" << epsilon_ << " time=[" << time_.lo << "," << time_.hi << ")";
  return os.str();
}

Interval ControlMeasure::jump_support() const {
  return std::visit(
      Overloaded{[](const DiscreteJumps& d) {
                   const auto [lo, hi] = std::minmax_element(d.sizes.begin(), d.sizes.end());
                   return Interval{*lo, std::nextafter(*hi, kInf)};
                 },
                 [&](const GeneralizedGamma&) { return Interval{epsilon_, kInf}; },
                 [&](const ExtendedGamma&) { return Interval{epsilon_, kInf}; },
                 [&](const BetaJumps&) { return Interval{epsilon_, 1.0}; }},
      marginal_);
}

Interval ControlMeasure::effective_jump(Interval jump) const {
  return jump.intersect(jump_support());
}

double ControlMeasure::jump_moment(double x, int i, Interval jump) const {
  if (i < 0) throw std::invalid_argument("moment order must be nonnegative");
  if (!time_.contains(x)) return 0.0;
  const Interval j = effective_jump(jump);
  if (j.empty()) return 0.0;
  return std::visit(
      Overloaded{[&](const DiscreteJumps& d) {
                   double s = 0.0;
                   for (std::size_t k = 0; k < d.sizes.size(); ++k)
                     if (j.contains(d.sizes[k])) s += d.weights[k] * std::pow(d.sizes[k], i);
                   return s;
                 },
                 [&](const GeneralizedGamma& g) {
                   if (i == 0 && j.lo <= 0.0) return kInf;
                   return gamma_type_moment(g.sigma, g.gamma, i, j.lo, j.hi) / std::tgamma(1.0 - g.sigma);
                 },
                 [&](const ExtendedGamma& e) {
                   if (i == 0 && j.lo <= 0.0) return kInf;
                   return gamma_type_moment(0.0, e.beta(x), i, j.lo, j.hi);
                 },
                 [&](const BetaJumps& b) { return beta_type_moment(b.concentration(x), i, j.lo, j.hi); }},
      marginal_);
}

double ControlMeasure::jump_mass(double x, Interval jump) const { return jump_moment(x, 0, jump); }

double ControlMeasure::jump_density(double u, double x) const {
  if (!time_.contains(x) || !jump_support().contains(u)) return 0.0;
  return std::visit(
      Overloaded{[](const DiscreteJumps&) -> double {
                   throw std::logic_error("discrete jump marginal has no density");
                 },
                 [&](const GeneralizedGamma& g) {
                   return std::pow(u, -1.0 - g.sigma) * std::exp(-g.gamma * u) / std::tgamma(1.0 - g.sigma);
                 },
                 [&](const ExtendedGamma& e) { return std::exp(-e.beta(x) * u) / u; },
                 [&](const BetaJumps& b) {
                   const double c = b.concentration(x);
                   return c * std::exp((c - 1.0) * std::log1p(-u)) / u;
                 }},
      marginal_);
}

double ControlMeasure::moment(int i) const {
  if (i < 0 || i > 6) throw std::out_of_range("cached moments cover orders 0..6");
  if (!homogeneous()) throw std::logic_error("moments of a non-homogeneous control depend on x");
  return moments_[i];
}

double ControlMeasure::full_moment(double x, int i) const {
  if (i < 1) throw std::invalid_argument("full moments are defined for orders >= 1");
  return std::visit(
      Overloaded{[&](const DiscreteJumps&) { return jump_moment(x, i); },
                 [&](const GeneralizedGamma& g) {
                   return std::tgamma(i - g.sigma) * std::pow(g.gamma, g.sigma - i) / std::tgamma(1.0 - g.sigma);
                 },
                 [&](const ExtendedGamma& e) { return std::tgamma(static_cast<double>(i)) * std::pow(e.beta(x), -i); },
                 [&](const BetaJumps& b) {
                   const double c = b.concentration(x);
                   return c * boost::math::beta(static_cast<double>(i), c);
                 }},
      marginal_);
}

double ControlMeasure::neglected_moment(double x, int i) const {
  if (std::holds_alternative<DiscreteJumps>(marginal_) || epsilon_ <= 0.0) return 0.0;
  if (i < 1) return kInf;
  return std::visit(
      Overloaded{[](const DiscreteJumps&) { return 0.0; },
                 [&](const GeneralizedGamma& g) {
                   return gamma_type_moment(g.sigma, g.gamma, i, 0.0, epsilon_) / std::tgamma(1.0 - g.sigma);
                 },
                 [&](const ExtendedGamma& e) { return gamma_type_moment(0.0, e.beta(x), i, 0.0, epsilon_); },
                 [&](const BetaJumps& b) { return beta_type_moment(b.concentration(x), i, 0.0, epsilon_); }},
      marginal_);
}

double measure_of(const ControlMeasure& control, const Window& region) {
  if (region.empty()) return 0.0;
  const Interval t = region.time.intersect(control.time_support());
  const Interval j = region.jump.intersect(control.jump_support());
  if (t.empty() || j.empty()) return 0.0;
  const bool finite_activity = std::holds_alternative<DiscreteJumps>(control.marginal());
  if (!finite_activity && j.lo <= 0.0)
    throw InfiniteMassError("infinite mass: epsilon = 0 with an infinite-activity jump measure");
  if (!t.bounded()) throw InfiniteMassError("infinite mass: unbounded time range");
  if (control.homogeneous()) return control.jump_mass(t.lo, j) * t.length();
  const PowerLaw& p = std::holds_alternative<ExtendedGamma>(control.marginal())
                          ? std::get<ExtendedGamma>(control.marginal()).beta
                          : std::get<BetaJumps>(control.marginal()).concentration;
  const auto breaks = kink_points(p, t);
  return integrate_value([&](double x) { return control.jump_mass(x, j); }, t.lo, t.hi, 1e-11, breaks);
}

namespace {

// Dominating density C u^{-1-sigma} e^{-gamma u} on [a, b), sampled piecewise:
// a pure power law below s = max(a, 1/gamma), an exponential beyond.
struct PowerEnvelope {
  double scale = 1.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double b = kInf;
  double s = 0.0;
  double mass_power = 0.0;
  double mass_exp = 0.0;

  PowerEnvelope(double c, double sig, double gam, double lo, double hi)
      : scale(c), sigma(sig), gamma(gam), a(lo), b(hi) {
    s = gamma > 0.0 ? std::min(std::max(a, 1.0 / gamma), b) : b;
    if (!std::isfinite(s)) throw InfiniteMassError("infinite mass: unbounded power-law envelope");
    mass_power = scale * power_integral(a, s);
    if (b > s && gamma > 0.0)
      mass_exp = scale * std::pow(s, -1.0 - sigma) * std::exp(-gamma * s) * -std::expm1(-gamma * (b - s)) / gamma;
  }

  double power_integral(double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    if (sigma == 0.0) return std::log(hi / lo);
    return (std::pow(lo, -sigma) - std::pow(hi, -sigma)) / sigma;
  }

  double mass() const { return mass_power + mass_exp; }

  // Draws u from the normalized envelope; returns target/envelope for the
  // base density C u^{-1-sigma} e^{-gamma u}.
  std::pair<double, double> propose(Engine& g) const {
    const double v = uniform_open(g);
    const double w = uniform01(g);
    if (w * mass() < mass_power) {
      double u;
      if (sigma == 0.0) {
        u = a * std::exp(v * std::log(s / a));
      } else {
        const double la = std::pow(a, -sigma);
        u = std::pow(la - v * (la - std::pow(s, -sigma)), -1.0 / sigma);
      }
      return {u, std::exp(-gamma * u)};
    }
    const double span = b - s;
    const double u = s - std::log1p(v * std::expm1(-gamma * span)) / gamma;
    return {u, std::pow(u / s, -1.0 - sigma)};
  }
};

double draw_discrete(Engine& g, const DiscreteJumps& d, const Interval& j) {
  std::vector<double> cum;
  std::vector<double> vals;
  double acc = 0.0;
  for (std::size_t k = 0; k < d.sizes.size(); ++k)
    if (j.contains(d.sizes[k])) {
      acc += d.weights[k];
      cum.push_back(acc);
      vals.push_back(d.sizes[k]);
    }
  const double t = uniform01(g) * acc;
  const auto it = std::upper_bound(cum.begin(), cum.end(), t);
  return vals[std::min<std::size_t>(it - cum.begin(), vals.size() - 1)];
}

void sample_homogeneous(const ControlMeasure& control, const Interval& t, const Interval& j,
                        double mass, Engine& g, std::vector<Atom>& atoms) {
  const std::uint64_t n = poisson_count(g, mass);
  atoms.reserve(n);
  const JumpMarginal& m = control.marginal();
  if (const auto* d = std::get_if<DiscreteJumps>(&m)) {
    for (std::uint64_t k = 0; k < n; ++k) {
      const double x = t.lo + t.length() * uniform01(g);
      atoms.push_back({draw_discrete(g, *d, j), x});
    }
    return;
  }
  double c = 1.0, sigma = 0.0, gamma = 0.0, beta_c = 0.0;
  if (const auto* gg = std::get_if<GeneralizedGamma>(&m)) {
    sigma = gg->sigma;
    gamma = gg->gamma;
  } else if (const auto* eg = std::get_if<ExtendedGamma>(&m)) {
    gamma = eg->beta(0.0);
  } else {
    beta_c = std::get<BetaJumps>(m).concentration(0.0);
    if (beta_c < 1.0) throw std::invalid_argument("Beta sampling requires c(x) >= 1");
    c = beta_c;
    gamma = beta_c - 1.0;
  }
  const PowerEnvelope env(c, sigma, gamma, j.lo, j.hi);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double x = t.lo + t.length() * uniform01(g);
    for (;;) {
      auto [u, ratio] = env.propose(g);
      if (beta_c > 0.0) ratio *= std::exp((beta_c - 1.0) * (std::log1p(-u) + u));
      if (uniform01(g) < ratio) {
        atoms.push_back({u, x});
        break;
      }
    }
  }
}

void sample_slabs(const ControlMeasure& control, const Interval& t, const Interval& j, Engine& g,
                  std::vector<Atom>& atoms) {
  const bool is_beta = std::holds_alternative<BetaJumps>(control.marginal());
  const PowerLaw p = is_beta ? std::get<BetaJumps>(control.marginal()).concentration
                             : std::get<ExtendedGamma>(control.marginal()).beta;
  constexpr double kRatio = 1.05;
  double x0 = t.lo;
  while (x0 < t.hi) {
    const double p0 = p(x0);
    double x1 = t.hi;
    while (p(x1) > kRatio * p0 && x1 - x0 > 1e-9 * (1.0 + std::abs(x0))) x1 = x0 + 0.5 * (x1 - x0);
    const double p1 = p(x1);
    double c = 1.0, gamma = p0;
    if (is_beta) {
      if (p0 < 1.0) throw std::invalid_argument("Beta sampling requires c(x) >= 1");
      c = p1;
      gamma = p0 - 1.0;
    }
    const PowerEnvelope env(c, 0.0, gamma, j.lo, j.hi);
    const double len = x1 - x0;
    const std::uint64_t n = poisson_count(g, env.mass() * len);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double x = x0 + len * uniform01(g);
      auto [u, ratio] = env.propose(g);
      const double px = p(x);
      if (is_beta) {
        ratio *= (px / c) * std::exp((px - 1.0) * std::log1p(-u) + gamma * u);
      } else {
        ratio *= std::exp(-(px - gamma) * u);
      }
      if (uniform01(g) < ratio) atoms.push_back({u, x});
    }
    x0 = x1;
  }
}

}  // namespace

PointPattern sample_pattern(const ControlMeasure& control, const Window& window, std::uint64_t seed) {
  PointPattern out;
  out.window = window;
  out.seed = seed;
  out.total_mass = measure_of(control, window);
  if (out.total_mass == 0.0) return out;
  const Interval t = window.time.intersect(control.time_support());
  const Interval j = window.jump.intersect(control.jump_support());
  Engine g(seed);
  if (control.homogeneous()) {
    sample_homogeneous(control, t, j, out.total_mass, g, out.atoms);
  } else {
    sample_slabs(control, t, j, g, out.atoms);
  }
  return out;
}

std::size_t count_in(const PointPattern& pattern, const Window& region) {
  return static_cast<std::size_t>(std::count_if(pattern.atoms.begin(), pattern.atoms.end(),
                                                [&](const Atom& a) { return region.contains(a); }));
}

double compensated_count(const PointPattern& pattern, const Window& region,
                         const ControlMeasure& control) {
  if (!pattern.window.covers(region)) throw std::invalid_argument("region is not inside the pattern window");
  return static_cast<double>(count_in(pattern, region)) - measure_of(control, region);
}

void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
  out << "u,x\n" << std::setprecision(17);
  for (const Atom& a : pattern.atoms) out << a.u << ',' << a.x << '\n';
}

PointPattern read_pattern_csv(std::istream& in) {
  PointPattern p;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = line.rfind("u,x", 0) == 0;
    break;
  }
  if (!header) throw std::runtime_error("pattern CSV must start with header u,x");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Atom a;
    char comma = 0;
    if (!(row >> a.u >> comma >> a.x) || comma != ',') throw std::runtime_error("malformed pattern row: " + line);
    p.atoms.push_back(a);
  }
  return p;
}

}  // namespace pchaos
