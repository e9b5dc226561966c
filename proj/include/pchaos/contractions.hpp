#pragma once

#include <span>
#include <variant>
#include <vector>

#include "pchaos/kernels.hpp"

namespace pchaos {

// r variables identified, l of them integrated out.
struct ContractionIndex {
  int r = 1;
  int l = 1;
};

// Contraction of arity 3 or 4 kept as its two factors; only pointwise
// values and norms are ever computed from it.
struct LazyContraction {
  Kernel f;
  Kernel g;
  ContractionIndex idx;

  int arity() const { return f.arity() + g.arity() - idx.r - idx.l; }
  // Points are ordered as (identified..., rest of f..., rest of g...).
  double evaluate(std::span<const Atom> points) const;
};

using StarResult = std::variant<Kernel, double, LazyContraction>;

StarResult star(const Kernel& f, const Kernel& g, ContractionIndex idx, const ControlMeasure& control);

// Squared L2 norm of a contraction result (a scalar is squared).
double star_norm_sq(const StarResult& s, const ControlMeasure& control);

struct ContractionNorms {
  double n11 = 0.0;  // ||f *_1^1 f||^2
  double n21 = 0.0;  // ||f *_2^1 f||^2
  double n10 = 0.0;  // ||f *_1^0 f||^2 = int (int f(z, .)^2 dmu)^2 dmu
  double discrepancy = 0.0;  // relative gap between two quadrature levels
};

ContractionNorms contraction_norms(const Kernel& f, const ControlMeasure& control);

struct ProductTerm {
  int order = 0;
  int r = 0;
  int l = 0;
  double coefficient = 0.0;
  StarResult kernel;
};

struct ProductExpansion {
  int p = 0;
  int q = 0;
  std::vector<ProductTerm> terms;
};

// Terms r! C(p,r) C(q,r) C(r,l) I_{p+q-r-l}(f *_r^l g), p, q in {1, 2}.
ProductExpansion product_expand(int p, int q, const Kernel& f, const Kernel& g, const ControlMeasure& control);

double product_coefficient(int p, int q, int r, int l);

}  // namespace pchaos
