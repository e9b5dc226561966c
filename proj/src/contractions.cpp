#include "pchaos/contractions.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "pchaos/ou_time.hpp"
#include "pchaos/quadrature.hpp"
#include "overloaded.hpp"

namespace pchaos {

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

void check_index(int p, int q, ContractionIndex idx) {
  if (idx.r < 0 || idx.l < 0 || idx.l > idx.r || idx.r > std::min(p, q))
    throw std::out_of_range("contraction index needs 0 <= l <= r <= min(p, q)");
}

bool same_partition(const GridKernel& a, const GridKernel& b) {
  return a.partition.jump_edges == b.partition.jump_edges && a.partition.time_edges == b.partition.time_edges &&
         a.masses == b.masses;
}

StarResult grid_star(const GridKernel& f, const GridKernel& g, ContractionIndex idx, double scale, const Kernel& fk,
                     const Kernel& gk) {
  if (!same_partition(f, g)) throw std::invalid_argument("grid contraction needs a shared partition");
  const std::size_t n = f.cells();
  const auto& m = f.masses;
  const int p = f.arity, q = g.arity;
  auto fv = [&](std::size_t a, std::size_t b) { return f.values[a * n + b]; };
  auto gv = [&](std::size_t a, std::size_t b) { return g.values[a * n + b]; };
  auto make = [&](std::vector<double> v, int arity) {
    GridKernel out{f.partition, f.masses, std::move(v), arity};
    return StarResult{Kernel(std::move(out), scale)};
  };
  const int out_arity = p + q - idx.r - idx.l;
  if (out_arity > 2) return LazyContraction{fk, gk, idx};
  if (p == 1 && q == 1) {
    if (idx.r == 0) {
      std::vector<double> v(n * n);
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) v[c * n + d] = f.values[c] * g.values[d];
      return make(std::move(v), 2);
    }
    if (idx.l == 0) {
      std::vector<double> v(n);
      for (std::size_t c = 0; c < n; ++c) v[c] = f.values[c] * g.values[c];
      return make(std::move(v), 1);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += f.values[c] * g.values[c] * m[c];
    return scale * s;
  }
  if (p == 1 || q == 1) {
    const GridKernel& one = p == 1 ? f : g;
    const GridKernel& two = p == 1 ? g : f;
    auto tv = [&](std::size_t a, std::size_t b) { return two.values[a * n + b]; };
    if (idx.l == 0) {
      std::vector<double> v(n * n);
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) v[c * n + d] = one.values[c] * tv(c, d);
      return make(std::move(v), 2);
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t c = 0; c < n; ++c) v[d] += one.values[c] * tv(c, d) * m[c];
    return make(std::move(v), 1);
  }
  if (idx.r == 1 && idx.l == 1) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t z = 0; z < n; ++z) {
        const double w = fv(z, a) * m[z];
        if (w == 0.0) continue;
        for (std::size_t b = 0; b < n; ++b) v[a * n + b] += w * gv(z, b);
      }
    return make(std::move(v), 2);
  }
  if (idx.r == 2 && idx.l == 0) {
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n * n; ++i) v[i] = f.values[i] * g.values[i];
    return make(std::move(v), 2);
  }
  if (idx.r == 2 && idx.l == 1) {
    std::vector<double> v(n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t z = 0; z < n; ++z) v[c] += fv(z, c) * gv(z, c) * m[z];
    return make(std::move(v), 1);
  }
  double s = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s += fv(a, b) * gv(a, b) * m[a] * m[b];
  return scale * s;
}

double uniform_block_mass(const BlockKernel& b, const ControlMeasure& control) {
  const auto ms = block_masses(b.blocks, b.origin, b.block_length, control);
  for (double v : ms)
    if (std::abs(v - ms.front()) > 1e-12 * std::abs(ms.front()))
      throw std::invalid_argument("block contraction needs equal block masses");
  return ms.front();
}

bool same_layout(const BlockKernel& a, const BlockKernel& b) {
  return a.blocks == b.blocks && a.origin == b.origin && a.block_length == b.block_length;
}

bool same_ou(const OUDoubleH& a, const OUDoubleH& b) {
  return a.lambda == b.lambda && a.horizon == b.horizon && a.depth == b.depth && a.printed_form == b.printed_form;
}

bool same_ou(const OUInstant& a, const OUInstant& b) {
  return a.lambda == b.lambda && a.time == b.time && a.depth == b.depth;
}

}  // namespace

double product_coefficient(int p, int q, int r, int l) {
  return static_cast<double>(factorial(r) * binom(p, r) * binom(q, r) * binom(r, l));
}

double LazyContraction::evaluate(std::span<const Atom> points) const {
  if (static_cast<int>(points.size()) != arity()) throw std::invalid_argument("arity mismatch for lazy contraction");
  if (idx.l != 0) throw std::logic_error("lazy contractions with integrated variables are not evaluable pointwise");
  const int r = idx.r;
  const int fp = f.arity() - r;
  auto pick = [&](const Kernel& k, int rest_offset, int rest_count) {
    std::vector<Atom> args(points.begin(), points.begin() + r);
    for (int i = 0; i < rest_count; ++i) args.push_back(points[rest_offset + i]);
    return k.arity() == 1 ? pchaos::evaluate(k, args[0]) : pchaos::evaluate(k, args[0], args[1]);
  };
  return pick(f, r, fp) * pick(g, r + fp, g.arity() - r);
}

StarResult star(const Kernel& f, const Kernel& g, ContractionIndex idx, const ControlMeasure& control) {
  const int p = f.arity(), q = g.arity();
  check_index(p, q, idx);
  const int out_arity = p + q - idx.r - idx.l;
  if (f.is_zero() || g.is_zero()) {
    if (out_arity == 0) return 0.0;
    if (out_arity <= 2) return zero_kernel(out_arity);
    return LazyContraction{f, g, idx};
  }
  const double scale = f.scale() * g.scale();
  if (const auto* fg = std::get_if<GridKernel>(&f.family()))
    if (const auto* gg = std::get_if<GridKernel>(&g.family())) return grid_star(*fg, *gg, idx, scale, f, g);
  if (out_arity > 2) return LazyContraction{f, g, idx};
  if (p != 2 || q != 2) throw std::invalid_argument("no exact contraction for this kernel pair");

  if (const auto* fb = std::get_if<BlockKernel>(&f.family()))
    if (const auto* gb = std::get_if<BlockKernel>(&g.family()); gb && same_layout(*fb, *gb)) {
      const double m = uniform_block_mass(*fb, control);
      const double a = fb->amplitude * gb->amplitude;
      if (idx.r == 1) return Kernel(BlockKernel{fb->blocks, fb->origin, fb->block_length, a * m}, scale);
      if (idx.l == 0) return Kernel(BlockKernel{fb->blocks, fb->origin, fb->block_length, a}, scale);
      if (idx.l == 1) return Kernel(BlockFunction{fb->blocks, fb->origin, fb->block_length, a * m}, scale);
      return scale * a * m * m * fb->blocks;
    }

  if (const auto* fh = std::get_if<OUDoubleH>(&f.family()))
    if (const auto* gh = std::get_if<OUDoubleH>(&g.family()); gh && same_ou(*fh, *gh)) {
      const double m2 = abs_moment(control, 2);
      const auto ou = std::make_shared<OUTime>(fh->lambda, fh->horizon, fh->depth, fh->printed_form);
      const Interval t{-fh->depth, std::nextafter(fh->horizon, kInf)};
      if (idx.r == 1)
        return Kernel(Separable2{1, [ou, m2](double a, double b) { return m2 * ou->q(a, b); }, t, {0.0}}, scale);
      if (idx.l == 0)
        return Kernel(Separable2{2, [ou](double a, double b) { const double v = ou->phi(a, b); return v * v; }, t, {0.0}},
                      scale);
      if (idx.l == 1) return Kernel(Separable1{2, [ou, m2](double y) { return m2 * ou->s(y); }, t, {0.0}}, scale);
      return scale * m2 * m2 * ou->phi_sq_integral();
    }

  if (const auto* fi = std::get_if<OUInstant>(&f.family()))
    if (const auto* gi = std::get_if<OUInstant>(&g.family()); gi && same_ou(*fi, *gi)) {
      const double m2 = abs_moment(control, 2);
      const double g2 = -std::expm1(-2.0 * fi->lambda * (fi->time + fi->depth));
      const Interval t{-fi->depth, std::nextafter(fi->time, kInf)};
      const OUInstant k = *fi;
      auto gsq = [k](double x) {
        if (x < -k.depth || x > k.time) return 0.0;
        return 2.0 * k.lambda * std::exp(-2.0 * k.lambda * (k.time - x));
      };
      if (idx.r == 1) return Kernel(k, scale * m2 * g2);
      if (idx.l == 0) return Kernel(Separable2{2, [gsq](double a, double b) { return gsq(a) * gsq(b); }, t, {}}, scale);
      if (idx.l == 1) return Kernel(Separable1{2, [gsq, m2, g2](double y) { return m2 * g2 * gsq(y); }, t, {}}, scale);
      return scale * m2 * m2 * g2 * g2;
    }
  throw std::invalid_argument("no exact contraction for this kernel pair");
}

double star_norm_sq(const StarResult& s, const ControlMeasure& control) {
  if (const auto* v = std::get_if<double>(&s)) return *v * *v;
  if (const auto* k = std::get_if<Kernel>(&s)) return l2_norm_sq(*k, control);
  const auto& lz = std::get<LazyContraction>(s);
  if (lz.f.is_zero() || lz.g.is_zero()) return 0.0;
  if (lz.idx.r == 0) return l2_norm_sq(lz.f, control) * l2_norm_sq(lz.g, control);
  if (lz.idx.r == 1 && lz.idx.l == 0 && lz.f.arity() == 2 && lz.g.arity() == 2) {
    const auto* fg = std::get_if<GridKernel>(&lz.f.family());
    const auto* gg = std::get_if<GridKernel>(&lz.g.family());
    if (fg && gg) {
      double out = 0.0;
      for (std::size_t c = 0; c < fg->cells(); ++c) {
        double rf = 0.0, rg = 0.0;
        for (std::size_t d = 0; d < fg->cells(); ++d) {
          rf += fg->at(c, d) * fg->at(c, d) * fg->masses[d];
          rg += gg->at(c, d) * gg->at(c, d) * gg->masses[d];
        }
        out += fg->masses[c] * rf * rg;
      }
      return out * std::pow(lz.f.scale() * lz.g.scale(), 2);
    }
    const auto* fb = std::get_if<BlockKernel>(&lz.f.family());
    const auto* gb = std::get_if<BlockKernel>(&lz.g.family());
    if (fb && gb && same_layout(*fb, *gb)) {
      double out = 0.0;
      for (double m : block_masses(fb->blocks, fb->origin, fb->block_length, control)) out += m * m * m;
      return out * std::pow(lz.f.scale() * fb->amplitude * lz.g.scale() * gb->amplitude, 2);
    }
    const auto* fh = std::get_if<OUDoubleH>(&lz.f.family());
    const auto* gh = std::get_if<OUDoubleH>(&lz.g.family());
    if (fh && gh && same_ou(*fh, *gh)) {
      const OUTime ou(fh->lambda, fh->horizon, fh->depth, fh->printed_form);
      const double m2 = abs_moment(control, 2);
      return std::pow(lz.f.scale() * lz.g.scale(), 2) * abs_moment(control, 4) * m2 * m2 * ou.s_sq_integral();
    }
  }
  throw std::invalid_argument("norm of this contraction is not available");
}

ContractionNorms contraction_norms(const Kernel& f, const ControlMeasure& control) {
  if (f.arity() != 2) throw std::invalid_argument("contraction norms need an arity-2 kernel");
  ContractionNorms out;
  if (f.is_zero()) return out;
  const double s4 = std::pow(f.scale(), 4);
  std::visit(
      Overloaded{
          [&](const GridKernel& g) {
            const std::size_t n = g.cells();
            const auto& m = g.masses;
            std::vector<double> row(n, 0.0);
            for (std::size_t t = 0; t < n; ++t) {
              std::fill(row.begin(), row.end(), 0.0);
              for (std::size_t z = 0; z < n; ++z) {
                const double w = g.at(z, t) * m[z];
                if (w == 0.0) continue;
                for (std::size_t s = 0; s < n; ++s) row[s] += w * g.at(z, s);
              }
              double acc = 0.0;
              for (std::size_t s = 0; s < n; ++s) acc += row[s] * row[s] * m[s];
              out.n11 += acc * m[t];
            }
            for (std::size_t c = 0; c < n; ++c) {
              double col = 0.0, r = 0.0;
              for (std::size_t z = 0; z < n; ++z) {
                col += g.at(z, c) * g.at(z, c) * m[z];
                r += g.at(c, z) * g.at(c, z) * m[z];
              }
              out.n21 += col * col * m[c];
              out.n10 += r * r * m[c];
            }
          },
          [&](const BlockKernel& b) {
            const double a4 = std::pow(b.amplitude, 4);
            for (double m : block_masses(b.blocks, b.origin, b.block_length, control)) {
              out.n11 += a4 * m * m * m * m;
              out.n21 += a4 * m * m * m;
            }
            out.n10 = out.n21;
          },
          [&](const OUDoubleH& h) {
            const OUTime ou(h.lambda, h.horizon, h.depth, h.printed_form);
            const double m2 = abs_moment(control, 2), m4 = abs_moment(control, 4);
            const TwoLevel q = two_level([&](double tol) { return ou.q_sq_integral(tol); }, 1e-6, 1e-8);
            const TwoLevel s = two_level([&](double tol) { return ou.s_sq_integral(tol); }, 1e-6, 1e-10);
            out.n11 = m2 * m2 * m2 * m2 * q.value;
            out.n21 = m4 * m2 * m2 * s.value;
            out.n10 = out.n21;
            out.discrepancy = std::max(q.discrepancy, s.discrepancy);
          },
          [&](const OUInstant& h) {
            const double m2 = abs_moment(control, 2), m4 = abs_moment(control, 4);
            const double g2 = -std::expm1(-2.0 * h.lambda * (h.time + h.depth));
            const double g4 = h.lambda * -std::expm1(-4.0 * h.lambda * (h.time + h.depth));
            out.n11 = std::pow(m2 * g2, 4);
            out.n21 = m4 * m2 * m2 * g2 * g2 * g4;
            out.n10 = out.n21;
          },
          [&](const Separable2& k) {
            if (!k.time.bounded()) throw DivergenceError("unbounded separable kernel");
            const double m2k = abs_moment(control, 2 * k.u_power), m4k = abs_moment(control, 4 * k.u_power);
            const Interval t = k.time;
            auto qfun = [&](double a, double b, double tol) {
              return integrate_value([&](double y) { return k.time_fn(a, y) * k.time_fn(b, y); }, t.lo, t.hi, tol,
                                     k.breaks);
            };
            auto rowsq = [&](double a, double tol) {
              return integrate_value([&](double y) { const double v = k.time_fn(y, a); return v * v; }, t.lo, t.hi, tol,
                                     k.breaks);
            };
            auto rowsq_first = [&](double a, double tol) {
              return integrate_value([&](double y) { const double v = k.time_fn(a, y); return v * v; }, t.lo, t.hi, tol,
                                     k.breaks);
            };
            auto n11_at = [&](double tol) {
              return integrate_value(
                  [&](double b) {
                    return integrate_value([&](double a) { const double v = qfun(a, b, tol); return v * v; }, t.lo,
                                           t.hi, tol, k.breaks);
                  },
                  t.lo, t.hi, tol, k.breaks);
            };
            const TwoLevel q = two_level(n11_at, 1e-5, 1e-7);
            out.n11 = m2k * m2k * m2k * m2k * q.value;
            const double s21 = integrate_value([&](double a) { const double v = rowsq(a, 1e-9); return v * v; }, t.lo,
                                               t.hi, 1e-9, k.breaks);
            const double s10 = integrate_value([&](double a) { const double v = rowsq_first(a, 1e-9); return v * v; },
                                               t.lo, t.hi, 1e-9, k.breaks);
            out.n21 = m4k * m2k * m2k * s21;
            out.n10 = m4k * m2k * m2k * s10;
            out.discrepancy = q.discrepancy;
          },
          [](const ZeroKernel&) {},
          [](const auto&) { throw std::invalid_argument("contraction norms need an arity-2 kernel family"); }},
      f.family());
  out.n11 *= s4;
  out.n21 *= s4;
  out.n10 *= s4;
  for (double v : {out.n11, out.n21, out.n10})
    if (!std::isfinite(v)) throw DivergenceError("contraction norm diverges");
  return out;
}

ProductExpansion product_expand(int p, int q, const Kernel& f, const Kernel& g, const ControlMeasure& control) {
  if (p < 1 || p > 2 || q < 1 || q > 2) throw std::invalid_argument("product expansion supports p, q in {1, 2}");
  if (f.arity() != p || g.arity() != q) throw std::invalid_argument("kernel arities do not match p and q");
  ProductExpansion out{p, q, {}};
  for (int r = 0; r <= std::min(p, q); ++r)
    for (int l = 0; l <= r; ++l) {
      StarResult k = star(f, g, {r, l}, control);
      if (auto* kk = std::get_if<Kernel>(&k); kk && kk->arity() == 2) k = symmetrize(*kk);
      out.terms.push_back({p + q - r - l, r, l, product_coefficient(p, q, r, l), std::move(k)});
    }
  return out;
}

}  // namespace pchaos
