#include "pchaos/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pchaos/mc_harness.hpp"
#include "pchaos/ou_time.hpp"
#include "pchaos/quadrature.hpp"
#include "overloaded.hpp"

namespace pchaos {

namespace {

void check_support(const Kernel& k, const PointPattern& pattern, const ControlMeasure& control) {
  const Window relevant = k.support().intersect(Window{control.jump_support(), control.time_support()});
  if (relevant.empty()) return;
  if (!pattern.window.covers(relevant))
    throw SupportError("kernel support leaks outside the pattern window");
}

int block_of(double x, int blocks, double origin, double len) {
  const double r = (x - origin) / len;
  if (!(r >= 0.0) || r >= blocks) return -1;
  return std::min(static_cast<int>(r), blocks - 1);
}

double i2_grid(const GridKernel& g, const PointPattern& p) {
  const std::size_t n = g.cells();
  std::vector<double> counts(n, 0.0);
  for (const Atom& a : p.atoms)
    if (const auto c = g.partition.locate(a)) counts[*c] += 1.0;
  double pairs = 0.0, comp = 0.0, total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    double row = 0.0, col = 0.0, against = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      row += g.at(c, d) * g.masses[d];
      col += g.at(d, c) * g.masses[d];
      against += g.at(c, d) * counts[d];
      total += g.at(c, d) * g.masses[c] * g.masses[d];
    }
    pairs += counts[c] * (against - g.at(c, c));
    comp += counts[c] * (row + col);
  }
  return pairs - comp + total;
}

double i2_block(const BlockKernel& b, const PointPattern& p, const ControlMeasure& control) {
  const auto masses = block_masses(b.blocks, b.origin, b.block_length, control);
  std::vector<double> counts(masses.size(), 0.0);
  for (const Atom& a : p.atoms) {
    const int j = block_of(a.x, b.blocks, b.origin, b.block_length);
    if (j >= 0) counts[j] += 1.0;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j)
    s += counts[j] * counts[j] - counts[j] - 2.0 * counts[j] * masses[j] + masses[j] * masses[j];
  return b.amplitude * s;
}

double i2_ou(const OUDoubleH& h, const PointPattern& p, const ControlMeasure& control) {
  const OUTime ou(h.lambda, h.horizon, h.depth, h.printed_form);
  std::vector<Atom> atoms;
  for (const Atom& a : p.atoms)
    if (ou.inside(a.x)) atoms.push_back(a);
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  double pairs = 0.0, carry = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (j > 0) carry = (carry + atoms[j - 1].u) * std::exp(-h.lambda * (atoms[j].x - atoms[j - 1].x));
    pairs += atoms[j].u * ou.w_hat(atoms[j].x) * carry;
  }
  pairs *= 2.0 / h.horizon;
  const double m1 = control.moment(1);
  if (m1 == 0.0) return pairs;
  double comp = 0.0;
  for (const Atom& a : atoms) comp += a.u * ou.psi(a.x);
  return pairs - 2.0 * m1 * comp + m1 * m1 * ou.phi_integral();
}

double i2_instant(const OUInstant& h, const PointPattern& p, const ControlMeasure& control) {
  double lin = 0.0, sq = 0.0, comp = 0.0;
  for (const Atom& a : p.atoms) {
    if (a.x < -h.depth || a.x > h.time) continue;
    const double v = a.u * std::sqrt(2.0 * h.lambda) * std::exp(-h.lambda * (h.time - a.x));
    lin += v;
    sq += v * v;
    comp += compensator(Kernel(h), a, control);
  }
  return lin * lin - sq - 2.0 * comp + integral(Kernel(h), control);
}

double i2_generic(const Kernel& f, const PointPattern& p, const ControlMeasure& control) {
  const auto& atoms = p.atoms;
  double pairs = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) pairs += evaluate(f, atoms[i], atoms[j]);
    comp += compensator(f, atoms[i], control);
  }
  return 2.0 * pairs - 2.0 * comp + integral(f, control);
}

double integrability_quantity(const Kernel& f, const ControlMeasure& control) {
  const double s2 = f.scale() * f.scale();
  return std::visit(
      Overloaded{[&](const GridKernel& g) {
                   double out = 0.0;
                   for (std::size_t c = 0; c < g.cells(); ++c) {
                     double inner = 0.0;
                     for (std::size_t d = 0; d < g.cells(); ++d) inner += std::pow(g.at(d, c), 4) * g.masses[d];
                     out += g.masses[c] * std::sqrt(inner);
                   }
                   return s2 * out;
                 },
                 [&](const BlockKernel& b) {
                   double out = 0.0;
                   for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) out += std::pow(m, 1.5);
                   return s2 * b.amplitude * b.amplitude * out;
                 },
                 [&](const OUDoubleH& h) {
                   const OUTime ou(h.lambda, h.horizon, h.depth, h.printed_form);
                   return s2 * abs_moment(control, 2) * std::sqrt(abs_moment(control, 4)) * ou.phi4_root_integral();
                 },
                 [&](const OUInstant& h) {
                   const double g2 = -std::expm1(-2.0 * h.lambda * (h.time + h.depth));
                   const double g4 = h.lambda * -std::expm1(-4.0 * h.lambda * (h.time + h.depth));
                   return s2 * abs_moment(control, 2) * g2 * std::sqrt(abs_moment(control, 4) * g4);
                 },
                 [](const ZeroKernel&) { return 0.0; },
                 [](const auto&) { return std::numeric_limits<double>::quiet_NaN(); }},
      f.family());
}

// int fn(u, x) mu(du, dx) over the kernel support, for arity-1 kernels.
template <class Fn>
double integrate_arity1(const Kernel& g, const ControlMeasure& control, Fn&& fn) {
  const Interval t = g.support().time.intersect(control.time_support());
  if (t.empty()) return 0.0;
  if (!t.bounded()) throw DivergenceError("integral over an unbounded time range");
  const std::vector<double> breaks = g.time_breaks();
  if (const auto* d = std::get_if<DiscreteJumps>(&control.marginal())) {
    double s = 0.0;
    for (std::size_t k = 0; k < d->sizes.size(); ++k) {
      const double u = d->sizes[k];
      s += d->weights[k] * integrate_value([&](double x) { return fn(u, x); }, t.lo, t.hi, 1e-11, breaks);
    }
    return s;
  }
  const Interval j = control.jump_support();
  std::vector<double> ubreaks;
  for (double v = j.lo * 10.0; v < std::min(j.hi, 1e3); v *= 10.0) ubreaks.push_back(v);
  return integrate_value(
      [&](double x) {
        return integrate_value([&](double u) { return control.jump_density(u, x) * fn(u, x); }, j.lo, j.hi, 1e-10,
                               ubreaks);
      },
      t.lo, t.hi, 1e-9, breaks);
}

}  // namespace

double eval_I1(const Kernel& g, const PointPattern& pattern, const ControlMeasure& control) {
  if (g.arity() != 1) throw std::invalid_argument("eval_I1 needs an arity-1 kernel");
  if (g.is_zero()) return 0.0;
  check_support(g, pattern, control);
  double s = 0.0;
  for (const Atom& a : pattern.atoms) s += evaluate(g, a);
  return s - integral(g, control);
}

double eval_I2(const Kernel& f, const PointPattern& pattern, const ControlMeasure& control) {
  if (f.arity() != 2) throw std::invalid_argument("eval_I2 needs an arity-2 kernel");
  if (f.is_zero()) return 0.0;
  check_support(f, pattern, control);
  const double v = std::visit(
      Overloaded{[&](const GridKernel& g) { return i2_grid(g, pattern); },
                 [&](const BlockKernel& b) { return i2_block(b, pattern, control); },
                 [&](const OUDoubleH& h) { return i2_ou(h, pattern, control); },
                 [&](const OUInstant& h) { return i2_instant(h, pattern, control); },
                 [&](const Separable2&) { return i2_generic(symmetrize(Kernel(f.family())), pattern, control); },
                 [&](const auto&) { return i2_generic(Kernel(f.family()), pattern, control); }},
      f.family());
  return f.scale() * v;
}

double charlier_block_oracle(const PointPattern& pattern, const std::vector<Window>& blocks,
                             const ControlMeasure& control) {
  if (blocks.empty()) throw std::invalid_argument("charlier oracle needs at least one block");
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (!blocks[i].intersect(blocks[j]).empty()) throw std::invalid_argument("blocks overlap");
  double s = 0.0;
  for (const Window& b : blocks) {
    const double m = measure_of(control, b);
    if (std::abs(m - 1.0) > 1e-12) throw std::invalid_argument("charlier oracle needs blocks of unit mass");
    const double nhat = compensated_count(pattern, b, control);
    s += (nhat * nhat - nhat - 1.0) / std::sqrt(2.0);
  }
  return s / std::sqrt(static_cast<double>(blocks.size()));
}

FourthMoment fourth_moment_breakdown(const Kernel& f, const ControlMeasure& control) {
  if (f.arity() != 2) throw std::invalid_argument("fourth moment needs an arity-2 kernel");
  FourthMoment out;
  out.norm2_doubled = 2.0 * l2_norm_sq(f, control);
  const ContractionNorms n = contraction_norms(f, control);
  out.n11 = n.n11;
  out.n21 = n.n21;
  out.n10 = n.n10;
  out.discrepancy = n.discrepancy;
  const double a = out.norm2_doubled;
  out.value = 3.0 * a * a + 48.0 * n.n11 + 96.0 * n.n10 + 16.0 * n.n21;
  out.order4 = 2.0 * a * a + 16.0 * n.n11;
  out.order3 = 96.0 * n.n10;
  out.order2 = 32.0 * n.n11;
  out.order1 = 16.0 * n.n21;
  out.order0 = a * a;
  out.value_from_orders = out.order4 + out.order3 + out.order2 + out.order1 + out.order0;
  return out;
}

double fourth_moment_chaos(const Kernel& f, const ControlMeasure& control) {
  return fourth_moment_breakdown(f, control).value;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Undecided: return "UNDECIDED";
  }
  return "?";
}

LimitCheck limit_to_constant(const std::string& name, const std::vector<double>& index,
                             const std::vector<double>& values, double c) {
  LimitCheck out{name, c, false, values.front(), values.back(), std::nullopt, 0.0, false};
  const bool last_ok = std::abs(values.back() - c) <= 0.05 * std::abs(c);
  std::vector<double> xs, devs;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::abs(values[i] - c);
    max_dev = std::max(max_dev, d);
    if (d > 0.0) {
      xs.push_back(index[i]);
      devs.push_back(d);
    }
  }
  if (max_dev <= 1e-12 * std::max(1.0, std::abs(c))) {
    out.pass = last_ok;
    return out;
  }
  if (xs.size() >= 3) {
    const SlopeFit fit = slope_fit(xs, devs);
    out.slope = fit.slope;
    out.slope_half_width = fit.half_width;
  }
  out.pass = last_ok && out.slope && *out.slope < 0.0;
  return out;
}

LimitCheck limit_to_zero(const std::string& name, const std::vector<double>& index, const std::vector<double>& values,
                         double ratio, double max_slope) {
  LimitCheck out{name, 0.0, true, values.front(), values.back(), std::nullopt, 0.0, false};
  if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    out.pass = true;
    return out;
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0.0) {
      xs.push_back(index[i]);
      ys.push_back(values[i]);
    }
  if (xs.size() >= 3) {
    const SlopeFit fit = slope_fit(xs, ys);
    out.slope = fit.slope;
    out.slope_half_width = fit.half_width;
  }
  out.pass = values.back() < ratio * values.front() && out.slope && *out.slope < max_slope;
  return out;
}

CriterionReport criterion_report(const Kernel& f, double index, const ControlMeasure& control) {
  CriterionReport r;
  r.index = index;
  try {
    const FourthMoment fm = fourth_moment_breakdown(f, control);
    r.norm2_doubled = fm.norm2_doubled;
    r.n11 = fm.n11;
    r.n21 = fm.n21;
    r.n10 = fm.n10;
    r.fourth_moment_chaos = fm.value;
    r.l4 = lp_integral(f, 4.0, control);
    r.integrability = integrability_quantity(f, control);
    r.integrable = std::isfinite(r.n21) && (std::isnan(r.integrability) || std::isfinite(r.integrability));
    if (std::isnan(r.integrability)) r.note = "integrability quantity unavailable for this family";
  } catch (const DivergenceError& e) {
    r.integrable = false;
    r.note = e.what();
  }
  return r;
}

CriterionSequence clt_criterion(const std::vector<Kernel>& seq, const std::vector<double>& indices,
                                const ControlMeasure& control) {
  if (seq.size() != indices.size() || seq.size() < 3)
    throw std::invalid_argument("criterion needs at least three kernels with matching indices");
  CriterionSequence out;
  std::vector<double> norm, l4, n11, n21;
  bool integrable = true;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.elements.push_back(criterion_report(seq[i], indices[i], control));
    const CriterionReport& r = out.elements.back();
    integrable = integrable && r.integrable;
    norm.push_back(r.norm2_doubled);
    l4.push_back(r.l4);
    n11.push_back(r.n11);
    n21.push_back(r.n21);
  }
  if (!integrable) return out;
  out.checks.push_back(limit_to_constant("normalization", indices, norm, 1.0));
  out.checks.push_back(limit_to_zero("fourth_power", indices, l4));
  out.checks.push_back(limit_to_zero("contraction_11", indices, n11));
  out.checks.push_back(limit_to_zero("contraction_21", indices, n21));
  const bool all = std::all_of(out.checks.begin(), out.checks.end(), [](const LimitCheck& c) { return c.pass; });
  out.verdict = all ? Verdict::Pass : Verdict::Fail;
  return out;
}

SingleCltReport single_clt_check(const std::vector<Kernel>& seq, const std::vector<double>& indices,
                                 const ControlMeasure& control) {
  if (seq.size() != indices.size() || seq.size() < 3)
    throw std::invalid_argument("single check needs at least three kernels with matching indices");
  SingleCltReport out;
  out.indices = indices;
  for (const Kernel& g : seq) {
    if (g.arity() != 1) throw std::invalid_argument("single check needs arity-1 kernels");
    out.norm2.push_back(l2_norm_sq(g, control));
    out.cube.push_back(lp_integral(g, 3.0, control));
  }
  out.checks.push_back(limit_to_constant("norm", indices, out.norm2, 1.0));
  out.checks.push_back(limit_to_zero("cube", indices, out.cube, 0.25, -0.25));
  const bool all = std::all_of(out.checks.begin(), out.checks.end(), [](const LimitCheck& c) { return c.pass; });
  out.verdict = all ? Verdict::Pass : Verdict::Fail;
  return out;
}

std::complex<double> levy_khinchine_cf(const Kernel& g, double theta, const ControlMeasure& control) {
  if (g.arity() != 1) throw std::invalid_argument("characteristic function needs an arity-1 kernel");
  if (theta == 0.0 || g.is_zero()) return {1.0, 0.0};
  auto point = [theta](double v) {
    return std::complex<double>(std::cos(theta * v) - 1.0, std::sin(theta * v) - theta * v);
  };
  std::complex<double> psi;
  if (const auto* grid = std::get_if<GridKernel>(&g.family())) {
    for (std::size_t c = 0; c < grid->cells(); ++c) psi += grid->masses[c] * point(g.scale() * grid->values[c]);
  } else if (const auto* b = std::get_if<BlockFunction>(&g.family())) {
    for (double m : block_masses(b->blocks, b->origin, b->block_length, control))
      psi += m * point(g.scale() * b->amplitude);
  } else {
    const double re = integrate_arity1(g, control, [&](double u, double x) { return point(evaluate(g, {u, x})).real(); });
    const double im = integrate_arity1(g, control, [&](double u, double x) { return point(evaluate(g, {u, x})).imag(); });
    psi = {re, im};
  }
  if (!std::isfinite(psi.real()) || !std::isfinite(psi.imag())) throw DivergenceError("Levy-Khinchine exponent diverges");
  return std::exp(psi);
}

UiTail ui_tail(const std::vector<double>& samples, const std::vector<double>& thresholds) {
  UiTail out;
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  for (double s : samples) out.fourth_moment += std::pow(s, 4) / n;
  for (double m : thresholds) {
    double v = 0.0;
    for (double s : samples) {
      const double f4 = std::pow(s, 4);
      if (f4 > m) v += f4;
    }
    out.points.push_back({m, v / n});
  }
  out.heavy_tail = !out.points.empty() && out.points.back().value > 0.01 * out.fourth_moment;
  return out;
}

nlohmann::json to_json(const CriterionReport& r) {
  nlohmann::json j{{"index", r.index},
                   {"norm2_doubled", r.norm2_doubled},
                   {"l4", r.l4},
                   {"n11", r.n11},
                   {"n21", r.n21},
                   {"n10", r.n10},
                   {"fourth_moment_chaos", r.fourth_moment_chaos},
                   {"integrable", r.integrable}};
  j["integrability"] = std::isfinite(r.integrability) ? nlohmann::json(r.integrability) : nlohmann::json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const LimitCheck& c) {
  nlohmann::json j{{"quantity", c.name},
                   {"limit", c.limit},
                   {"rule", c.to_zero ? "to_zero" : "to_constant"},
                   {"initial", c.initial},
                   {"last", c.last},
                   {"verdict", c.pass ? "PASS" : "FAIL"}};
  j["slope"] = c.slope ? nlohmann::json(*c.slope) : nlohmann::json(nullptr);
  j["slope_half_width"] = c.slope_half_width;
  return j;
}

nlohmann::json to_json(const CriterionSequence& s) {
  nlohmann::json j;
  auto& el = j["elements"] = nlohmann::json::array();
  for (const auto& r : s.elements) el.push_back(to_json(r));
  auto& ch = j["checks"] = nlohmann::json::array();
  for (const auto& c : s.checks) ch.push_back(to_json(c));
  j["verdict"] = to_string(s.verdict);
  return j;
}

nlohmann::json to_json(const SingleCltReport& s) {
  nlohmann::json j{{"indices", s.indices}, {"norm2", s.norm2}, {"cube", s.cube}};
  auto& ch = j["checks"] = nlohmann::json::array();
  for (const auto& c : s.checks) ch.push_back(to_json(c));
  j["verdict"] = to_string(s.verdict);
  return j;
}

}  // namespace pchaos
