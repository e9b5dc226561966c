#include "pchaos/ou_levy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pchaos/chaos.hpp"
#include "pchaos/ou_time.hpp"
#include "pchaos/quadrature.hpp"

namespace pchaos {

namespace {

std::vector<Atom> sorted_atoms(const PointPattern& p) {
  std::vector<Atom> a = p.atoms;
  std::sort(a.begin(), a.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  return a;
}

void require_moment(const ControlMeasure& c, int i) {
  const double m = abs_moment(c, i);
  if (!std::isfinite(m)) throw std::invalid_argument("jump moment of order " + std::to_string(i) + " is infinite");
}

}  // namespace

OUConfig OUConfig::make(double lambda, ControlMeasure control, double horizon, std::optional<double> depth,
                        bool printed_form) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("OU needs lambda > 0 and T > 0");
  if (!control.homogeneous()) throw std::invalid_argument("OU needs a homogeneous control");
  if (!control.time_support().covers(Interval{-depth.value_or(12.0 / lambda), horizon}))
    throw std::invalid_argument("control time support must cover [-L, T]");
  const double m2 = abs_moment(control, 2);
  if (std::abs(m2 - 1.0) > 1e-10) throw NormalizationError("jump measure must satisfy int u^2 nu(du) = 1");
  require_moment(control, 3);
  const double l = depth.value_or(12.0 / lambda);
  if (!(std::exp(-2.0 * lambda * l) < 1e-10)) throw std::invalid_argument("truncation depth L too small");
  return OUConfig{lambda, std::move(control), horizon, l, printed_form};
}

Window OUConfig::window() const { return {Interval{}, {-depth, std::nextafter(horizon, kInf)}}; }

double OUConfig::c_nu_sq() const { return abs_moment(control, 4); }

PointPattern sample_ou_pattern(const OUConfig& cfg, std::uint64_t seed) {
  return sample_pattern(cfg.control, cfg.window(), seed);
}

std::vector<double> ou_path(const OUConfig& cfg, const PointPattern& pattern, std::span<const double> times) {
  const std::vector<Atom> atoms = sorted_atoms(pattern);
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  const double lam = cfg.lambda;
  const double amp = std::sqrt(2.0 * lam);
  const double m1 = cfg.control.moment(1);
  std::vector<double> out(times.size());
  double s = 0.0, at = -cfg.depth;
  std::size_t k = 0;
  for (std::size_t idx : order) {
    const double t = times[idx];
    if (t < -cfg.depth || t > cfg.horizon) throw std::out_of_range("path time outside [-L, T]");
    while (k < atoms.size() && atoms[k].x <= t) {
      s = s * std::exp(-lam * (atoms[k].x - at)) + atoms[k].u;
      at = atoms[k].x;
      ++k;
    }
    const double here = s * std::exp(-lam * (t - at));
    const double comp = m1 == 0.0 ? 0.0 : m1 * -std::expm1(-lam * (t + cfg.depth)) / lam;
    out[idx] = amp * (here - comp);
  }
  return out;
}

std::vector<double> simulate_ou_path(const OUConfig& cfg, std::uint64_t seed, std::span<const double> times) {
  return ou_path(cfg, sample_ou_pattern(cfg, seed), times);
}

PathIntegrals ou_path_integrals(const OUConfig& cfg, const PointPattern& pattern) {
  const std::vector<Atom> atoms = sorted_atoms(pattern);
  const double lam = cfg.lambda;
  const double amp = std::sqrt(2.0 * lam);
  const double m1 = cfg.control.moment(1);
  const double b = -amp * m1 / lam;
  double s = 0.0, at = -cfg.depth;
  std::size_t k = 0;
  while (k < atoms.size() && atoms[k].x <= 0.0) {
    s = s * std::exp(-lam * (atoms[k].x - at)) + atoms[k].u;
    at = atoms[k].x;
    ++k;
  }
  s *= std::exp(-lam * (0.0 - at));
  at = 0.0;
  PathIntegrals out;
  auto piece = [&](double lo, double hi, double s_lo) {
    const double d = hi - lo;
    if (!(d > 0.0)) return;
    const double a = amp * (s_lo + m1 * std::exp(-lam * (lo + cfg.depth)) / lam);
    const double e1 = -std::expm1(-lam * d) / lam;
    const double e2 = -std::expm1(-2.0 * lam * d) / (2.0 * lam);
    out.linear += a * e1 + b * d;
    out.square += a * a * e2 + 2.0 * a * b * e1 + b * b * d;
  };
  for (; k < atoms.size() && atoms[k].x <= cfg.horizon; ++k) {
    piece(at, atoms[k].x, s);
    s = s * std::exp(-lam * (atoms[k].x - at)) + atoms[k].u;
    at = atoms[k].x;
  }
  piece(at, cfg.horizon, s);
  return out;
}

double ou_path_square_trapezoid(const OUConfig& cfg, const PointPattern& pattern, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = cfg.horizon * static_cast<double>(i) / static_cast<double>(steps);
  const std::vector<double> y = ou_path(cfg, pattern, t);
  const double h = cfg.horizon / static_cast<double>(steps);
  double s = 0.5 * (y.front() * y.front() + y.back() * y.back());
  for (std::size_t i = 1; i < steps; ++i) s += y[i] * y[i];
  return s * h;
}

Kernel ou_single_kernel(const OUConfig& cfg) { return Kernel(OUSingle{cfg.lambda, cfg.horizon, cfg.depth}); }

Kernel ou_double_kernel(const OUConfig& cfg) {
  return Kernel(OUDoubleH{cfg.lambda, cfg.horizon, cfg.depth, cfg.printed_form}, std::sqrt(cfg.horizon));
}

Kernel ou_diag_kernel(const OUConfig& cfg) {
  return Kernel(OUDiagHstar{cfg.lambda, cfg.horizon, cfg.depth, cfg.printed_form}, std::sqrt(cfg.horizon));
}

double ou_linear_stat(const OUConfig& cfg, const PointPattern& pattern) {
  return eval_I1(ou_single_kernel(cfg), pattern, cfg.control);
}

double ou_linear_stat(const OUConfig& cfg, std::uint64_t seed) {
  return ou_linear_stat(cfg, sample_ou_pattern(cfg, seed));
}

QuadraticStat ou_quadratic_stat(const OUConfig& cfg, const PointPattern& pattern) {
  for (int j : {4, 6}) require_moment(cfg.control, j);
  QuadraticStat q;
  q.k2 = eval_I2(ou_double_kernel(cfg), pattern, cfg.control);
  q.k1 = eval_I1(ou_diag_kernel(cfg), pattern, cfg.control);
  q.total = q.k2 + q.k1;
  return q;
}

QuadraticStat ou_quadratic_stat(const OUConfig& cfg, std::uint64_t seed) {
  return ou_quadratic_stat(cfg, sample_ou_pattern(cfg, seed));
}

SampleVarianceStat ou_sample_variance_stat(const OUConfig& cfg, const PointPattern& pattern) {
  const QuadraticStat q = ou_quadratic_stat(cfg, pattern);
  const double lin = ou_linear_stat(cfg, pattern);
  SampleVarianceStat s;
  s.correction = lin * lin / std::sqrt(cfg.horizon);
  s.value = q.total - s.correction;
  return s;
}

SampleVarianceStat ou_sample_variance_stat(const OUConfig& cfg, std::uint64_t seed) {
  return ou_sample_variance_stat(cfg, sample_ou_pattern(cfg, seed));
}

double linear_stat_variance(double lambda, double horizon, double depth) {
  const double e1 = -std::expm1(-lambda * horizon);
  const double past = std::isinf(depth) ? 1.0 : -std::expm1(-2.0 * lambda * depth);
  return 2.0 / (lambda * horizon) *
         (e1 * e1 * past / (2.0 * lambda) + horizon - 2.0 * e1 / lambda + -std::expm1(-2.0 * lambda * horizon) / (2.0 * lambda));
}

double k2_variance(const OUConfig& cfg) { return 2.0 * l2_norm_sq(ou_double_kernel(cfg), cfg.control); }

double k1_variance(const OUConfig& cfg) { return l2_norm_sq(ou_diag_kernel(cfg), cfg.control); }

}  // namespace pchaos
