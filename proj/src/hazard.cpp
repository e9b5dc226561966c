#include "pchaos/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "overloaded.hpp"
#include "pchaos/quadrature.hpp"

namespace pchaos {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
  const double lo = std::max(a0, b0), hi = std::min(a1, b1);
  return hi > lo ? hi - lo : 0.0;
}

std::vector<Atom> sorted_atoms(const PointPattern& p) {
  std::vector<Atom> a = p.atoms;
  std::sort(a.begin(), a.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  return a;
}

double tau_of(const HazardModel& m) {
  const auto* r = std::get_if<HazardRect>(&m.kernel);
  if (!r) throw std::invalid_argument("statistic is defined for the rectangular kernel only");
  return r->tau;
}

void require_finite_moments(const ControlMeasure& c, int up_to) {
  if (!c.homogeneous()) throw std::invalid_argument("statistic needs a homogeneous control");
  for (int i = 1; i <= up_to; ++i)
    if (!std::isfinite(c.moment(i))) throw std::invalid_argument("jump moment K^(" + std::to_string(i) + ") is infinite");
}

bool same_law(const PowerLaw& a, const PowerLaw& b) {
  return a.offset == b.offset && a.coeff == b.coeff && a.power == b.power && a.floor == b.floor;
}

}  // namespace

double hazard_kernel(const HazardKernel& k, double t, double x) {
  return std::visit(Overloaded{
                        [&](const HazardRect& r) { return std::abs(t - x) <= r.tau ? 1.0 : 0.0; },
                        [&](const HazardDL&) { return (x >= 0.0 && x <= t) ? 1.0 : 0.0; },
                        [&](const HazardOU& o) {
                          return (x >= 0.0 && x <= t) ? std::sqrt(2.0 * o.lambda) * std::exp(-o.lambda * (t - x)) : 0.0;
                        },
                    },
                    k);
}

double hazard_kernel_integral(const HazardKernel& k, double x, double horizon) {
  return std::visit(Overloaded{
                        [&](const HazardRect& r) { return overlap(x - r.tau, x + r.tau, 0.0, horizon); },
                        [&](const HazardDL&) { return (x >= 0.0 && x <= horizon) ? horizon - x : 0.0; },
                        [&](const HazardOU& o) {
                          if (x < 0.0 || x > horizon) return 0.0;
                          return std::sqrt(2.0 * o.lambda) * -std::expm1(-o.lambda * (horizon - x)) / o.lambda;
                        },
                    },
                    k);
}

double hazard_pair_integral(const HazardKernel& k, double x, double y, double horizon) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  return std::visit(Overloaded{
                        [&](const HazardRect& r) { return overlap(hi - r.tau, lo + r.tau, 0.0, horizon); },
                        [&](const HazardDL&) { return (lo >= 0.0 && hi <= horizon) ? horizon - hi : 0.0; },
                        [&](const HazardOU& o) {
                          if (lo < 0.0 || hi > horizon) return 0.0;
                          return std::exp(-o.lambda * (hi - lo)) * -std::expm1(-2.0 * o.lambda * (horizon - hi));
                        },
                    },
                    k);
}

std::string describe(const HazardKernel& k) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const HazardRect& r) { os << "rect(tau=" << r.tau << ")"; },
                 [&](const HazardDL&) { os << "dykstra-laud"; },
                 [&](const HazardOU& o) { os << "ou(lambda=" << o.lambda << ")"; },
             },
             k);
  return os.str();
}

HazardModel HazardModel::make(HazardKernel kernel, ControlMeasure control, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("hazard horizon must be positive");
  std::visit(Overloaded{
                 [](const HazardRect& r) {
                   if (!(r.tau > 0.0)) throw std::invalid_argument("rect kernel needs tau > 0");
                 },
                 [](const HazardDL&) {},
                 [](const HazardOU& o) {
                   if (!(o.lambda > 0.0)) throw std::invalid_argument("OU kernel needs lambda > 0");
                 },
             },
             kernel);
  if (control.jump_support().lo < 0.0) throw std::invalid_argument("hazard jumps must be nonnegative");
  return HazardModel{std::move(kernel), std::move(control), horizon};
}

Window HazardModel::window() const {
  Interval t = std::visit(Overloaded{
                              [&](const HazardRect& r) { return Interval{-r.tau, std::nextafter(horizon + r.tau, kInf)}; },
                              [&](const HazardDL&) { return Interval{0.0, std::nextafter(horizon, kInf)}; },
                              [&](const HazardOU&) { return Interval{0.0, std::nextafter(horizon, kInf)}; },
                          },
                          kernel);
  return {Interval{}, t.intersect(control.time_support())};
}

PointPattern sample_hazard_pattern(const HazardModel& model, std::uint64_t seed) {
  return sample_pattern(model.control, model.window(), seed);
}

std::vector<double> hazard_path(const HazardModel& model, const PointPattern& pattern, std::span<const double> times) {
  const std::vector<Atom> atoms = sorted_atoms(pattern);
  std::vector<double> xs(atoms.size()), prefix(atoms.size() + 1, 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    xs[i] = atoms[i].x;
    prefix[i + 1] = prefix[i] + atoms[i].u;
  }
  auto sum_between = [&](double lo, double hi) {
    const auto a = std::lower_bound(xs.begin(), xs.end(), lo) - xs.begin();
    const auto b = std::upper_bound(xs.begin(), xs.end(), hi) - xs.begin();
    return b > a ? prefix[b] - prefix[a] : 0.0;
  };
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    out[j] = std::visit(Overloaded{
                            [&](const HazardRect& r) { return sum_between(t - r.tau, t + r.tau); },
                            [&](const HazardDL&) { return t < 0.0 ? 0.0 : sum_between(0.0, t); },
                            [&](const HazardOU& o) {
                              double s = 0.0;
                              for (const Atom& a : atoms) {
                                if (a.x > t) break;
                                if (a.x >= 0.0) s += a.u * std::exp(-o.lambda * (t - a.x));
                              }
                              return std::sqrt(2.0 * o.lambda) * s;
                            },
                        },
                        model.kernel);
  }
  return out;
}

std::vector<double> simulate_hazard(const HazardModel& model, std::uint64_t seed, std::span<const double> times) {
  return hazard_path(model, sample_hazard_pattern(model, seed), times);
}

double cumulative_hazard(const HazardModel& model, const PointPattern& pattern, double horizon) {
  double s = 0.0;
  for (const Atom& a : pattern.atoms) s += a.u * hazard_kernel_integral(model.kernel, a.x, horizon);
  return s;
}

double cumulative_hazard(const HazardModel& model, std::uint64_t seed, double horizon) {
  return cumulative_hazard(model, sample_hazard_pattern(model, seed), horizon);
}

double hazard_square_integral(const HazardModel& model, const PointPattern& pattern, double horizon) {
  const std::vector<Atom> atoms = sorted_atoms(pattern);
  const auto* rect = std::get_if<HazardRect>(&model.kernel);
  const double reach = rect ? 2.0 * rect->tau : kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    s += atoms[i].u * atoms[i].u * hazard_pair_integral(model.kernel, atoms[i].x, atoms[i].x, horizon);
    for (std::size_t j = i + 1; j < atoms.size() && atoms[j].x - atoms[i].x <= reach; ++j)
      s += 2.0 * atoms[i].u * atoms[j].u * hazard_pair_integral(model.kernel, atoms[i].x, atoms[j].x, horizon);
  }
  return s;
}

namespace {

std::vector<double> grid_values(const HazardModel& model, const PointPattern& pattern, double horizon, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  return hazard_path(model, pattern, t);
}

double trapezoid(const std::vector<double>& v, double h) {
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

}  // namespace

double cumulative_hazard_trapezoid(const HazardModel& model, const PointPattern& pattern, double horizon,
                                   std::size_t steps) {
  return trapezoid(grid_values(model, pattern, horizon, steps), horizon / static_cast<double>(steps));
}

double hazard_square_trapezoid(const HazardModel& model, const PointPattern& pattern, double horizon,
                               std::size_t steps) {
  std::vector<double> v = grid_values(model, pattern, horizon, steps);
  for (double& x : v) x *= x;
  return trapezoid(v, horizon / static_cast<double>(steps));
}

namespace {

// int over the atom window of g(x) K_i(x) dx with K_i the i-th jump moment at x.
template <class G>
double time_integral(const HazardModel& model, int i, Interval range, std::vector<double> breaks, G&& g) {
  range = range.intersect(model.window().time);
  if (range.empty()) return 0.0;
  if (model.control.homogeneous()) {
    const double k = model.control.moment(i);
    return k * integrate_value([&](double x) { return g(x); }, range.lo, range.hi, 1e-11, breaks);
  }
  breaks.push_back(1.0);
  return integrate_value([&](double x) { return g(x) * model.control.jump_moment(x, i); }, range.lo, range.hi, 1e-10,
                         breaks);
}

}  // namespace

double hazard_mean(const HazardModel& model, double t) {
  return std::visit(Overloaded{
                        [&](const HazardRect& r) {
                          return time_integral(model, 1, {t - r.tau, t + r.tau}, {}, [](double) { return 1.0; });
                        },
                        [&](const HazardDL&) {
                          return time_integral(model, 1, {0.0, t}, {}, [](double) { return 1.0; });
                        },
                        [&](const HazardOU& o) {
                          return time_integral(model, 1, {0.0, t}, {}, [&](double x) {
                            return std::sqrt(2.0 * o.lambda) * std::exp(-o.lambda * (t - x));
                          });
                        },
                    },
                    model.kernel);
}

HazardMoments cumulative_hazard_moments(const HazardModel& model, double horizon) {
  const Interval range = model.window().time;
  std::vector<double> breaks{0.0, horizon};
  if (const auto* r = std::get_if<HazardRect>(&model.kernel)) {
    breaks = {-r->tau, r->tau, horizon - r->tau, horizon + r->tau};
  }
  std::vector<double> inside;
  for (double b : breaks)
    if (b > range.lo && b < range.hi) inside.push_back(b);
  auto ell = [&](double x) { return hazard_kernel_integral(model.kernel, x, horizon); };
  HazardMoments m;
  m.mean = time_integral(model, 1, range, inside, ell);
  m.variance = time_integral(model, 2, range, inside, [&](double x) {
    const double l = ell(x);
    return l * l;
  });
  return m;
}

ControlMeasure thm7_extended_gamma_control(double epsilon) {
  return ControlMeasure::extended_gamma(PowerLaw{1.0, 1.0, 0.5, 0.0}, epsilon);
}

ControlMeasure thm7_beta_control(double epsilon) {
  return ControlMeasure::beta(PowerLaw{0.0, 1.0, 0.5, 1.0}, epsilon);
}

Thm7Spec thm7_spec(const HazardModel& model, Thm7Case which) {
  const double tau = tau_of(model);
  const double t = model.horizon;
  const auto& marginal = model.control.marginal();
  switch (which) {
    case Thm7Case::Interior: {
      require_finite_moments(model.control, 2);
      const double k1 = model.control.moment(1), k2 = model.control.moment(2);
      return {2.0 * tau * k1 * t, std::sqrt(t), 4.0 * tau * tau * k2};
    }
    case Thm7Case::ExtendedGamma: {
      const auto* eg = std::get_if<ExtendedGamma>(&marginal);
      if (!eg || !same_law(eg->beta, PowerLaw{1.0, 1.0, 0.5, 0.0}) || tau != 1.0)
        throw std::invalid_argument("case 2 needs extended Gamma with beta(x) = 1 + x^{1/2} and tau = 1");
      if (!(t > 1.0)) throw std::invalid_argument("case 2 needs T > 1");
      return {4.0 * std::sqrt(t), std::sqrt(std::log(t)), 4.0};
    }
    case Thm7Case::Beta: {
      const auto* b = std::get_if<BetaJumps>(&marginal);
      if (!b || b->concentration.coeff != 1.0 || b->concentration.power != 0.5 || tau != 1.0)
        throw std::invalid_argument("case 3 needs Beta with c(x) ~ x^{1/2} and tau = 1");
      return {2.0 * t, std::pow(t, 0.25), 8.0};
    }
  }
  throw std::invalid_argument("unknown Theorem 7 case");
}

double thm7_stat(const HazardModel& model, Thm7Case which, const PointPattern& pattern) {
  const Thm7Spec s = thm7_spec(model, which);
  return (cumulative_hazard(model, pattern, model.horizon) - s.centering) / s.scale;
}

double thm7_stat(const HazardModel& model, Thm7Case which, std::uint64_t seed) {
  return thm7_stat(model, which, sample_hazard_pattern(model, seed));
}

Thm8Constants thm8_constants(const HazardModel& model) {
  const double tau = tau_of(model);
  require_finite_moments(model.control, 4);
  const auto& c = model.control;
  const double k1 = c.moment(1), k2 = c.moment(2), k3 = c.moment(3), k4 = c.moment(4);
  const double t2 = tau * tau;
  Thm8Constants out;
  out.centering = 2.0 * tau * k2 + 4.0 * t2 * k1 * k1;
  out.c1 = 16.0 * t2 * (k4 / 4.0 + 2.0 * tau * k1 * k3 + 2.0 * tau * k2 * k2 / 3.0 + 4.0 * t2 * k1 * k1 * k2);
  out.c1_printed = 16.0 * t2 * (k4 / 4.0 + tau * k1 * k3 + 2.0 * tau * k2 * k2 / 3.0 + t2 * k2 * k2 * k1);
  out.c2 = 4.0 * t2 * (k4 + 8.0 * tau * k2 * k2 / 3.0);
  return out;
}

double thm8_stat(const HazardModel& model, Thm8Variant variant, const PointPattern& pattern) {
  const Thm8Constants k = thm8_constants(model);
  const double t = model.horizon;
  const double sq = hazard_square_integral(model, pattern, t) / t;
  if (variant == Thm8Variant::Raw) return std::sqrt(t) * (sq - k.centering);
  const double tau = tau_of(model);
  const double mean = cumulative_hazard(model, pattern, t) / t;
  return std::sqrt(t) * (sq - mean * mean - 2.0 * tau * model.control.moment(2));
}

double thm8_stat(const HazardModel& model, Thm8Variant variant, std::uint64_t seed) {
  return thm8_stat(model, variant, sample_hazard_pattern(model, seed));
}

}  // namespace pchaos
