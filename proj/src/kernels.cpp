#include "pchaos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pchaos/ou_time.hpp"
#include "pchaos/quadrature.hpp"
#include "overloaded.hpp"

namespace pchaos {

namespace {

int family_arity(const KernelFamily& f) {
  return std::visit(Overloaded{[](const GridKernel& g) { return g.arity; },
                               [](const BlockKernel&) { return 2; },
                               [](const BlockFunction&) { return 1; },
                               [](const OUSingle&) { return 1; },
                               [](const OUDoubleH&) { return 2; },
                               [](const OUDiagHstar&) { return 1; },
                               [](const OUInstant&) { return 2; },
                               [](const Separable1&) { return 1; },
                               [](const Separable2&) { return 2; },
                               [](const ZeroKernel& z) { return z.arity; }},
                    f);
}

double ou_single_chi(const OUSingle& k, double x) {
  if (x < -k.depth || x > k.horizon) return 0.0;
  const double c = std::sqrt(2.0 * k.lambda / k.horizon) / k.lambda;
  if (x <= 0.0) return c * std::exp(k.lambda * x) * -std::expm1(-k.lambda * k.horizon);
  return c * -std::expm1(-k.lambda * (k.horizon - x));
}

double ou_instant_g(const OUInstant& k, double x) {
  if (x < -k.depth || x > k.time) return 0.0;
  return std::sqrt(2.0 * k.lambda) * std::exp(-k.lambda * (k.time - x));
}

// int g^p over [-L, t] for the OUInstant time factor.
double ou_instant_pow(const OUInstant& k, double p) {
  return std::pow(2.0 * k.lambda, 0.5 * p) * -std::expm1(-p * k.lambda * (k.time + k.depth)) / (p * k.lambda);
}

OUTime ou_time(const OUDoubleH& k) { return OUTime(k.lambda, k.horizon, k.depth, k.printed_form); }
OUTime ou_time(const OUDiagHstar& k) { return OUTime(k.lambda, k.horizon, k.depth, k.printed_form); }

int block_index(double x, int blocks, double origin, double len) {
  const double r = (x - origin) / len;
  if (!(r >= 0.0) || r >= blocks) return -1;
  return std::min(static_cast<int>(r), blocks - 1);
}

void require_homogeneous_over(const ControlMeasure& control, Interval time) {
  if (!control.homogeneous()) throw std::invalid_argument("analytic kernel families need a homogeneous control");
  if (!control.time_support().covers(time))
    throw std::invalid_argument("control time support does not cover the kernel support");
}

double time_integral_1d(const std::function<double(double)>& f, Interval t, const std::vector<double>& breaks,
                        double tol = 1e-11) {
  if (!t.bounded()) throw DivergenceError("time integral over an unbounded interval");
  return integrate_value(f, t.lo, t.hi, tol, breaks);
}

double time_integral_2d(const std::function<double(double, double)>& f, Interval t,
                        const std::vector<double>& breaks, double tol = 1e-9) {
  if (!t.bounded()) throw DivergenceError("time integral over an unbounded interval");
  auto outer = [&](double y) {
    std::vector<double> br = breaks;
    br.push_back(y);
    return integrate_value([&](double x) { return f(x, y); }, t.lo, t.hi, tol, br);
  };
  return integrate_value(outer, t.lo, t.hi, tol, breaks);
}

// int |k|^p d mu^arity for scale 1.
double unit_lp(const KernelFamily& fam, double p, const ControlMeasure& control) {
  return std::visit(
      Overloaded{
          [&](const GridKernel& g) {
            double s = 0.0;
            const std::size_t n = g.cells();
            if (g.arity == 1) {
              for (std::size_t c = 0; c < n; ++c) s += std::pow(std::abs(g.values[c]), p) * g.masses[c];
            } else {
              for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d)
                  s += std::pow(std::abs(g.values[c * n + d]), p) * g.masses[c] * g.masses[d];
            }
            return s;
          },
          [&](const BlockKernel& b) {
            double s = 0.0;
            for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) s += m * m;
            return std::pow(std::abs(b.amplitude), p) * s;
          },
          [&](const BlockFunction& b) {
            double s = 0.0;
            for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) s += m;
            return std::pow(std::abs(b.amplitude), p) * s;
          },
          [&](const OUSingle& k) {
            require_homogeneous_over(control, {-k.depth, k.horizon});
            double t;
            if (p == 2.0) {
              const double lam = k.lambda, T = k.horizon, L = k.depth;
              const double e1 = -std::expm1(-lam * T);
              t = 2.0 / (lam * T) *
                  (e1 * e1 * -std::expm1(-2.0 * lam * L) / (2.0 * lam) + T - 2.0 * e1 / lam +
                   -std::expm1(-2.0 * lam * T) / (2.0 * lam));
            } else {
              t = time_integral_1d([&](double x) { return std::pow(std::abs(ou_single_chi(k, x)), p); },
                                   {-k.depth, k.horizon}, {0.0});
            }
            return abs_moment(control, static_cast<int>(p)) * t;
          },
          [&](const OUDoubleH& k) {
            require_homogeneous_over(control, {-k.depth, k.horizon});
            const OUTime ou = ou_time(k);
            const double m = abs_moment(control, static_cast<int>(p));
            return m * m * (p == 2.0 ? ou.phi_sq_integral() : ou.phi_pow_integral(p));
          },
          [&](const OUDiagHstar& k) {
            require_homogeneous_over(control, {-k.depth, k.horizon});
            const OUTime ou = ou_time(k);
            const double t = time_integral_1d([&](double x) { return std::pow(std::abs(ou.diag(x)), p); },
                                              {-k.depth, k.horizon}, {0.0}, 1e-12);
            return abs_moment(control, static_cast<int>(2 * p)) * t;
          },
          [&](const OUInstant& k) {
            require_homogeneous_over(control, {-k.depth, k.time});
            const double m = abs_moment(control, static_cast<int>(p));
            const double g = ou_instant_pow(k, p);
            return m * m * g * g;
          },
          [&](const Separable1& k) {
            require_homogeneous_over(control, k.time);
            const double t = time_integral_1d([&](double x) { return std::pow(std::abs(k.time_fn(x)), p); },
                                              k.time, k.breaks);
            return abs_moment(control, static_cast<int>(k.u_power * p)) * t;
          },
          [&](const Separable2& k) {
            require_homogeneous_over(control, k.time);
            const double t = time_integral_2d(
                [&](double x, double y) { return std::pow(std::abs(k.time_fn(x, y)), p); }, k.time, k.breaks);
            const double m = abs_moment(control, static_cast<int>(k.u_power * p));
            return m * m * t;
          },
          [](const ZeroKernel&) { return 0.0; }},
      fam);
}

}  // namespace

Partition Partition::time_only(std::vector<double> time_edges) {
  Partition p;
  p.time_edges = std::move(time_edges);
  p.validate();
  return p;
}

Partition Partition::uniform_time(double lo, double hi, std::size_t bins) {
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  e.back() = hi;
  return time_only(std::move(e));
}

void Partition::validate() const {
  auto check = [](const std::vector<double>& e, const char* what) {
    if (e.size() < 2) throw std::invalid_argument(std::string(what) + " needs at least two edges");
    for (std::size_t i = 1; i < e.size(); ++i)
      if (!(e[i] > e[i - 1])) throw std::invalid_argument(std::string(what) + " must be strictly increasing");
  };
  check(jump_edges, "jump_edges");
  check(time_edges, "time_edges");
  if (!std::isfinite(time_edges.front()) || !std::isfinite(time_edges.back()))
    throw std::invalid_argument("time_edges must be finite");
}

std::optional<std::size_t> Partition::locate(const Atom& a) const {
  auto bin = [](const std::vector<double>& e, double v) -> std::optional<std::size_t> {
    if (!(v >= e.front() && v < e.back())) return std::nullopt;
    return static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), v) - e.begin() - 1);
  };
  const auto j = bin(jump_edges, a.u);
  const auto t = bin(time_edges, a.x);
  if (!j || !t) return std::nullopt;
  return *j * time_bins() + *t;
}

Window Partition::cell(std::size_t c) const {
  const std::size_t j = c / time_bins();
  const std::size_t t = c % time_bins();
  return {{jump_edges[j], jump_edges[j + 1]}, {time_edges[t], time_edges[t + 1]}};
}

Window Partition::bounds() const {
  return {{jump_edges.front(), jump_edges.back()}, {time_edges.front(), time_edges.back()}};
}

Kernel::Kernel(KernelFamily family, double scale)
    : family_(std::move(family)), scale_(scale), arity_(family_arity(family_)) {
  if (arity_ != 1 && arity_ != 2) throw std::invalid_argument("kernel arity must be 1 or 2");
  if (!std::isfinite(scale_)) throw std::invalid_argument("kernel scale must be finite");
  if (const auto* g = std::get_if<GridKernel>(&family_)) {
    const std::size_t n = g->cells();
    if (g->partition.cells() != n) throw std::invalid_argument("grid masses do not match the partition");
    if (g->values.size() != (arity_ == 1 ? n : n * n)) throw std::invalid_argument("grid values have the wrong size");
  }
  if (const auto* b = std::get_if<BlockKernel>(&family_); b && (b->blocks < 1 || !(b->block_length > 0.0)))
    throw std::invalid_argument("block kernel needs n >= 1 and positive block length");
  if (const auto* b = std::get_if<BlockFunction>(&family_); b && (b->blocks < 1 || !(b->block_length > 0.0)))
    throw std::invalid_argument("block function needs n >= 1 and positive block length");
}

Window Kernel::support() const {
  const Interval all{};
  return std::visit(
      Overloaded{[](const GridKernel& g) { return g.partition.bounds(); },
                 [&](const BlockKernel& b) { return Window{all, {b.origin, b.origin + b.blocks * b.block_length}}; },
                 [&](const BlockFunction& b) { return Window{all, {b.origin, b.origin + b.blocks * b.block_length}}; },
                 [&](const OUSingle& k) { return Window{all, {-k.depth, std::nextafter(k.horizon, kInf)}}; },
                 [&](const OUDoubleH& k) { return Window{all, {-k.depth, std::nextafter(k.horizon, kInf)}}; },
                 [&](const OUDiagHstar& k) { return Window{all, {-k.depth, std::nextafter(k.horizon, kInf)}}; },
                 [&](const OUInstant& k) { return Window{all, {-k.depth, std::nextafter(k.time, kInf)}}; },
                 [&](const Separable1& k) { return Window{all, k.time}; },
                 [&](const Separable2& k) { return Window{all, k.time}; },
                 [](const ZeroKernel&) { return Window{{0.0, 0.0}, {0.0, 0.0}}; }},
      family_);
}

std::vector<double> Kernel::time_breaks() const {
  return std::visit(
      Overloaded{[](const GridKernel& g) { return g.partition.time_edges; },
                 [](const BlockKernel& b) {
                   std::vector<double> e;
                   for (int j = 0; j <= b.blocks; ++j) e.push_back(b.origin + j * b.block_length);
                   return e;
                 },
                 [](const BlockFunction& b) {
                   std::vector<double> e;
                   for (int j = 0; j <= b.blocks; ++j) e.push_back(b.origin + j * b.block_length);
                   return e;
                 },
                 [](const Separable1& k) { return k.breaks; },
                 [](const Separable2& k) { return k.breaks; },
                 [](const auto&) { return std::vector<double>{0.0}; }},
      family_);
}

GridKernel make_grid(Partition partition, std::vector<double> values, int arity, const ControlMeasure& control) {
  partition.validate();
  GridKernel g;
  g.masses.resize(partition.cells());
  for (std::size_t c = 0; c < g.masses.size(); ++c) g.masses[c] = measure_of(control, partition.cell(c));
  g.partition = std::move(partition);
  g.values = std::move(values);
  g.arity = arity;
  Kernel check(g);
  return g;
}

Kernel block_kernel(int n, double block_length, double origin) {
  return Kernel(BlockKernel{n, origin, block_length, 1.0 / std::sqrt(2.0 * n)});
}

Kernel block_function(int n, double block_length, double origin) {
  return Kernel(BlockFunction{n, origin, block_length, 1.0 / std::sqrt(static_cast<double>(n))});
}

Kernel zero_kernel(int arity) { return Kernel(ZeroKernel{arity}); }

std::vector<double> block_masses(int blocks, double origin, double block_length, const ControlMeasure& control) {
  std::vector<double> m(static_cast<std::size_t>(blocks));
  for (int j = 0; j < blocks; ++j)
    m[j] = measure_of(control, Window{{}, {origin + j * block_length, origin + (j + 1) * block_length}});
  return m;
}

double evaluate(const Kernel& k, const Atom& a) {
  if (k.arity() != 1) throw std::invalid_argument("arity mismatch: kernel of arity 2 evaluated at one point");
  const double v = std::visit(
      Overloaded{[&](const GridKernel& g) {
                   const auto c = g.partition.locate(a);
                   return c ? g.values[*c] : 0.0;
                 },
                 [&](const BlockFunction& b) {
                   return block_index(a.x, b.blocks, b.origin, b.block_length) >= 0 ? b.amplitude : 0.0;
                 },
                 [&](const OUSingle& s) { return a.u * ou_single_chi(s, a.x); },
                 [&](const OUDiagHstar& s) { return a.u * a.u * ou_time(s).diag(a.x); },
                 [&](const Separable1& s) {
                   return s.time.contains(a.x) ? std::pow(a.u, s.u_power) * s.time_fn(a.x) : 0.0;
                 },
                 [](const auto&) { return 0.0; }},
      k.family());
  return k.scale() * v;
}

double evaluate(const Kernel& k, const Atom& a, const Atom& b) {
  if (k.arity() != 2) throw std::invalid_argument("arity mismatch: kernel of arity 1 evaluated at two points");
  const double v = std::visit(
      Overloaded{[&](const GridKernel& g) {
                   const auto c = g.partition.locate(a);
                   const auto d = g.partition.locate(b);
                   return c && d ? g.at(*c, *d) : 0.0;
                 },
                 [&](const BlockKernel& k2) {
                   if (a == b) return 0.0;
                   const int i = block_index(a.x, k2.blocks, k2.origin, k2.block_length);
                   return i >= 0 && i == block_index(b.x, k2.blocks, k2.origin, k2.block_length) ? k2.amplitude : 0.0;
                 },
                 [&](const OUDoubleH& h) { return a.u * b.u * ou_time(h).phi(a.x, b.x); },
                 [&](const OUInstant& h) { return a.u * b.u * ou_instant_g(h, a.x) * ou_instant_g(h, b.x); },
                 [&](const Separable2& s) {
                   if (!s.time.contains(a.x) || !s.time.contains(b.x)) return 0.0;
                   return std::pow(a.u * b.u, s.u_power) * s.time_fn(a.x, b.x);
                 },
                 [](const auto&) { return 0.0; }},
      k.family());
  return k.scale() * v;
}

Kernel symmetrize(const Kernel& k) {
  if (k.arity() != 2) throw std::invalid_argument("symmetrize needs an arity-2 kernel");
  if (const auto* g = std::get_if<GridKernel>(&k.family())) {
    GridKernel s = *g;
    const std::size_t n = g->cells();
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t d = 0; d < n; ++d) s.values[c * n + d] = 0.5 * (g->at(c, d) + g->at(d, c));
    return Kernel(std::move(s), k.scale());
  }
  if (const auto* s = std::get_if<Separable2>(&k.family())) {
    Separable2 out = *s;
    out.time_fn = [f = s->time_fn](double x, double y) { return 0.5 * (f(x, y) + f(y, x)); };
    return Kernel(std::move(out), k.scale());
  }
  return k;
}

double abs_moment(const ControlMeasure& control, int i) {
  if (!control.homogeneous()) throw std::invalid_argument("moments need a homogeneous control");
  if (const auto* d = std::get_if<DiscreteJumps>(&control.marginal())) {
    double s = 0.0;
    for (std::size_t k = 0; k < d->sizes.size(); ++k) s += d->weights[k] * std::pow(std::abs(d->sizes[k]), i);
    return s;
  }
  const double x = std::max(control.time_support().lo, 0.0);
  const double m = control.jump_moment(x, i);
  if (!std::isfinite(m)) throw DivergenceError("jump moment is infinite");
  return m;
}

double lp_integral(const Kernel& k, double p, const ControlMeasure& control) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (k.is_zero()) return 0.0;
  const double v = std::pow(std::abs(k.scale()), p) * unit_lp(k.family(), p, control);
  if (!std::isfinite(v)) throw DivergenceError("divergent integral");
  return v;
}

double lp_norm(const Kernel& k, double p, const ControlMeasure& control) {
  return std::pow(lp_integral(k, p, control), 1.0 / p);
}

double l2_norm_sq(const Kernel& k, const ControlMeasure& control) { return lp_integral(k, 2.0, control); }

TruncatedNorm l2_norm_sq_with_tail(const Kernel& k, const ControlMeasure& control) {
  TruncatedNorm out{l2_norm_sq(k, control), 0.0};
  if (const auto* h = std::get_if<OUDoubleH>(&k.family())) {
    const double m2 = abs_moment(control, 2);
    out.tail = k.scale() * k.scale() * m2 * m2 * ou_time(*h).truncation_tail();
  } else if (const auto* s = std::get_if<OUSingle>(&k.family())) {
    const double e1 = -std::expm1(-s->lambda * s->horizon);
    out.tail = k.scale() * k.scale() * abs_moment(control, 2) * 2.0 / (s->lambda * s->horizon) * e1 * e1 *
               std::exp(-2.0 * s->lambda * s->depth) / (2.0 * s->lambda);
  } else if (const auto* i = std::get_if<OUInstant>(&k.family())) {
    const double m2 = abs_moment(control, 2);
    const double g_all = 1.0;
    const double g_cut = -std::expm1(-2.0 * i->lambda * (i->time + i->depth));
    out.tail = k.scale() * k.scale() * m2 * m2 * (g_all * g_all - g_cut * g_cut);
  }
  return out;
}

double integral(const Kernel& k, const ControlMeasure& control) {
  if (k.is_zero()) return 0.0;
  const double v = std::visit(
      Overloaded{
          [&](const GridKernel& g) {
            double s = 0.0;
            const std::size_t n = g.cells();
            if (g.arity == 1) {
              for (std::size_t c = 0; c < n; ++c) s += g.values[c] * g.masses[c];
            } else {
              for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) s += g.values[c * n + d] * g.masses[c] * g.masses[d];
            }
            return s;
          },
          [&](const BlockKernel& b) {
            double s = 0.0;
            for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) s += m * m;
            return b.amplitude * s;
          },
          [&](const BlockFunction& b) {
            double s = 0.0;
            for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) s += m;
            return b.amplitude * s;
          },
          [&](const OUSingle& s) {
            require_homogeneous_over(control, {-s.depth, s.horizon});
            const double lam = s.lambda, T = s.horizon, L = s.depth;
            const double c = std::sqrt(2.0 * lam / T) / lam;
            const double e1 = -std::expm1(-lam * T);
            return control.moment(1) * c * (e1 * -std::expm1(-lam * L) / lam + T - e1 / lam);
          },
          [&](const OUDoubleH& h) {
            require_homogeneous_over(control, {-h.depth, h.horizon});
            const double m1 = control.moment(1);
            return m1 == 0.0 ? 0.0 : m1 * m1 * ou_time(h).phi_integral();
          },
          [&](const OUDiagHstar& h) {
            require_homogeneous_over(control, {-h.depth, h.horizon});
            const OUTime ou = ou_time(h);
            return control.moment(2) * ou.w_hat_integral(-h.depth, h.horizon) / h.horizon;
          },
          [&](const OUInstant& h) {
            require_homogeneous_over(control, {-h.depth, h.time});
            const double m1 = control.moment(1);
            const double g = ou_instant_pow(h, 1.0);
            return m1 * m1 * g * g;
          },
          [&](const Separable1& s) {
            require_homogeneous_over(control, s.time);
            const double m = control.jump_moment(std::max(s.time.lo, 0.0), s.u_power);
            return m == 0.0 ? 0.0 : m * time_integral_1d(s.time_fn, s.time, s.breaks);
          },
          [&](const Separable2& s) {
            require_homogeneous_over(control, s.time);
            const double m = control.jump_moment(std::max(s.time.lo, 0.0), s.u_power);
            return m == 0.0 ? 0.0 : m * m * time_integral_2d(s.time_fn, s.time, s.breaks);
          },
          [](const ZeroKernel&) { return 0.0; }},
      k.family());
  return k.scale() * v;
}

double compensator(const Kernel& k, const Atom& z, const ControlMeasure& control) {
  if (k.arity() != 2) throw std::invalid_argument("compensator needs an arity-2 kernel");
  if (k.is_zero()) return 0.0;
  const double v = std::visit(
      Overloaded{
          [&](const GridKernel& g) {
            const auto c = g.partition.locate(z);
            if (!c) return 0.0;
            double s = 0.0;
            for (std::size_t d = 0; d < g.cells(); ++d) s += g.at(*c, d) * g.masses[d];
            return s;
          },
          [&](const BlockKernel& b) {
            const int j = block_index(z.x, b.blocks, b.origin, b.block_length);
            if (j < 0) return 0.0;
            return b.amplitude *
                   measure_of(control, Window{{}, {b.origin + j * b.block_length, b.origin + (j + 1) * b.block_length}});
          },
          [&](const OUDoubleH& h) {
            const double m1 = control.moment(1);
            return m1 == 0.0 ? 0.0 : z.u * m1 * ou_time(h).psi(z.x);
          },
          [&](const OUInstant& h) {
            return z.u * control.moment(1) * ou_instant_g(h, z.x) * ou_instant_pow(h, 1.0);
          },
          [&](const Separable2& s) {
            if (!s.time.contains(z.x)) return 0.0;
            const double m = control.jump_moment(std::max(s.time.lo, 0.0), s.u_power);
            if (m == 0.0) return 0.0;
            auto br = s.breaks;
            br.push_back(z.x);
            return std::pow(z.u, s.u_power) * m *
                   time_integral_1d([&](double y) { return s.time_fn(z.x, y); }, s.time, br);
          },
          [](const auto&) { return 0.0; }},
      k.family());
  return k.scale() * v;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    out.push_back(v);
  }
  return out;
}

}  // namespace

void write_grid_csv(std::ostream& values, std::ostream& header, const GridKernel& g) {
  header << "arity = " << g.arity << '\n'
         << "jump_edges = " << join(g.partition.jump_edges) << '\n'
         << "time_edges = " << join(g.partition.time_edges) << '\n'
         << "masses = " << join(g.masses) << '\n';
  values << "row,col,value\n" << std::setprecision(17);
  const std::size_t n = g.cells();
  if (g.arity == 1) {
    for (std::size_t c = 0; c < n; ++c) values << c << ",0," << g.values[c] << '\n';
  } else {
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t d = 0; d < n; ++d) values << c << ',' << d << ',' << g.at(c, d) << '\n';
  }
}

GridKernel read_grid_csv(std::istream& values, std::istream& header) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(header, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const char* key : {"arity", "jump_edges", "time_edges", "masses"})
    if (!kv.count(key)) throw std::runtime_error(std::string("grid header is missing ") + key);
  GridKernel g;
  g.arity = std::stoi(kv["arity"]);
  g.partition.jump_edges = split_doubles(kv["jump_edges"]);
  g.partition.time_edges = split_doubles(kv["time_edges"]);
  g.partition.validate();
  g.masses = split_doubles(kv["masses"]);
  const std::size_t n = g.partition.cells();
  if (g.masses.size() != n) throw std::runtime_error("grid header masses do not match the partition");
  g.values.assign(g.arity == 1 ? n : n * n, 0.0);
  if (!std::getline(values, line) || line.rfind("row,col,value", 0) != 0)
    throw std::runtime_error("grid CSV must start with header row,col,value");
  while (std::getline(values, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t r = 0, c = 0;
    double v = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> r >> c1 >> c >> c2 >> v) || c1 != ',' || c2 != ',') throw std::runtime_error("malformed grid row: " + line);
    const std::size_t idx = g.arity == 1 ? r : r * n + c;
    if (r >= n || (g.arity == 2 && c >= n) || (g.arity == 1 && c != 0)) throw std::runtime_error("grid index out of range: " + line);
    g.values[idx] = v;
  }
  Kernel check(g);
  return g;
}

}  // namespace pchaos
