/* Copyright 2026 The SymForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Rule-based indefinite integration with respect to x.
//
// Covered: linearity; powers of linear forms; the elementary table applied to
// linear arguments; 1/(p + q x^2) and 1/sqrt(p - q x^2); derivative-divides
// substitution; integration by parts to depth 2; expansion of products of
// sums. Every result is checked by differentiation before it is returned.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "symforge/calculus.hpp"
#include "symforge/evalkit.hpp"
#include "symforge/expr.hpp"
#include "symforge/simplify.hpp"

namespace symforge {

struct Primitive {
  Expr integrand;
  Expr antiderivative;
};

struct IntegrateOptions {
  int max_parts_depth = 2;
  // Upper bound on recursive integration calls per top-level request.
  int max_calls = 400;
  // Expansion gives up beyond this many summands.
  std::size_t max_expanded_terms = 64;
};

namespace detail {

// Distributes products over sums and expands small integer powers of sums.
class Expander {
 public:
  explicit Expander(std::size_t max_terms) : max_terms_(max_terms) {}

  std::optional<Expr> run(const Expr& e) {
    Simplifier& s = simp_;
    if (e.is_op(Op::add) || e.is_op(Op::sub)) {
      SumForm sf = s.sum_of(e);
      std::vector<Expr> out;
      if (sf.constant != 0) out.push_back(rational_expr(sf.constant));
      for (auto& [mono, term] : sf.terms) {
        auto t = run(s.from_product(term.coef, term.factors));
        if (!t) return std::nullopt;
        out.push_back(*t);
      }
      return simplify(chain(out));
    }
    ProductForm pf = s.product_of(e);
    std::vector<Expr> summands{rational_expr(pf.coef)};
    for (const auto& f : pf.factors) {
      auto n = rational_value(f.exponent);
      bool is_sum = f.base.is_op(Op::add) || f.base.is_op(Op::sub);
      if (is_sum && n && is_integral(*n) && *n > 0 && *n <= 6) {
        auto inner = run(f.base);
        if (!inner) return std::nullopt;
        std::vector<Expr> parts = terms_of(*inner);
        for (int k = 0; k < n->convert_to<int>(); ++k) {
          std::vector<Expr> next;
          for (const auto& a : summands)
            for (const auto& b : parts) next.push_back(mul(a, b));
          if (next.size() > max_terms_) return std::nullopt;
          summands = std::move(next);
        }
      } else {
        for (auto& a : summands) a = mul(a, s.power_expr(f.base, f.exponent));
      }
    }
    return simplify(chain(summands));
  }

 private:
  std::vector<Expr> terms_of(const Expr& e) {
    if (!(e.is_op(Op::add) || e.is_op(Op::sub))) return {e};
    SumForm sf = simp_.sum_of(e);
    std::vector<Expr> out;
    if (sf.constant != 0) out.push_back(rational_expr(sf.constant));
    for (auto& [mono, term] : sf.terms) out.push_back(simp_.from_product(term.coef, term.factors));
    return out;
  }

  static Expr chain(const std::vector<Expr>& xs) {
    if (xs.empty()) return num(0);
    Expr acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
    return acc;
  }

  Simplifier simp_{SimplifyOptions{1u << 20}};
  std::size_t max_terms_;
};

class Integrator {
 public:
  explicit Integrator(IntegrateOptions opts) : opts_(opts) {}

  std::optional<Expr> integrate(const Expr& f, int depth) {
    if (++calls_ > opts_.max_calls) return std::nullopt;
    const Expr x = var_x();
    if (!contains(f, Symbol::x)) return d_mul(f, x);
    if (f.is_op(Op::add) || f.is_op(Op::sub)) {
      SumForm sf = simp_.sum_of(f);
      Expr acc = sf.constant != 0 ? mul(rational_expr(sf.constant), x) : num(0);
      for (auto& [mono, term] : sf.terms) {
        auto r = integrate(simp_.from_product(term.coef, term.factors), depth);
        if (!r) return std::nullopt;
        acc = d_add(acc, *r);
      }
      return acc;
    }
    ProductForm pf = simp_.product_of(f);
    std::vector<Factor> consts;
    std::vector<Factor> vary;
    for (auto& fac : pf.factors) {
      bool dep = contains(fac.base, Symbol::x) || contains(fac.exponent, Symbol::x);
      (dep ? vary : consts).push_back(fac);
    }
    auto r = integrate_product(vary, depth);
    if (!r) return std::nullopt;
    if (pf.coef == 1 && consts.empty()) return r;
    return d_mul(simp_.from_product(pf.coef, consts), *r);
  }

 private:
  struct Linear {
    Expr slope;
  };

  // u = a x + b with a free of x and nonzero.
  std::optional<Linear> linear(const Expr& u) {
    if (!contains(u, Symbol::x)) return std::nullopt;
    Expr du = differentiate(u, Symbol::x);
    if (contains(du, Symbol::x) || is_zero(du)) return std::nullopt;
    return Linear{du};
  }

  Expr product_expr(const std::vector<Factor>& fs) { return simp_.from_product(Rational(1), fs); }

  std::optional<Expr> integrate_product(const std::vector<Factor>& fs, int depth) {
    if (fs.size() == 1)
      if (auto r = single(fs[0], depth)) return r;
    if (auto r = substitution(fs)) return r;
    if (auto r = expanded(fs, depth)) return r;
    if (auto r = parts(fs, depth)) return r;
    return std::nullopt;
  }

  // Antiderivative of phi(u) in terms of u, for the elementary table.
  static std::optional<Expr> table(Op op, const Expr& u) {
    switch (op) {
      case Op::exp: return exp(u);
      case Op::sin: return neg(cos(u));
      case Op::cos: return sin(u);
      case Op::tan: return neg(ln(cos(u)));
      case Op::ln: return sub(mul(u, ln(u)), u);
      case Op::atan:
        return sub(mul(u, atan(u)), div(ln(add(num(1), pow(u, num(2)))), num(2)));
      case Op::asin: return add(mul(u, asin(u)), sqrt(sub(num(1), pow(u, num(2)))));
      case Op::acos: return sub(mul(u, acos(u)), sqrt(sub(num(1), pow(u, num(2)))));
      default: return std::nullopt;
    }
  }

  std::optional<Expr> single(const Factor& fac, int depth) {
    const Expr& b = fac.base;
    const Expr& e = fac.exponent;
    const bool exp_varies = contains(e, Symbol::x);
    if (!exp_varies) {
      auto k = rational_value(e);
      if (auto lin = linear(b)) {
        if (k && *k == -1) return d_div(ln(b), lin->slope);
        return div(pow(b, simp_.plus(e, num(1))), mul(simp_.plus(e, num(1)), lin->slope));
      }
      if (k && *k == 1 && b.is_apply() && b.arity() == 1) {
        if (auto lin = linear(b.child(0)))
          if (auto prim = table(b.op(), b.child(0))) return d_div(*prim, lin->slope);
      }
      if (k && (*k == -1 || *k == Rational(-1, 2)))
        if (auto r = inverse_trig(b, *k)) return r;
      if (k && is_integral(*k) && *k > 1 && (b.is_op(Op::add) || b.is_op(Op::sub)))
        return expanded({fac}, depth);
      return std::nullopt;
    }
    if (!contains(b, Symbol::x)) {
      if (auto lin = linear(e)) return div(pow(b, e), mul(lin->slope, ln(b)));
    }
    return std::nullopt;
  }

  // 1/(p + q x^2) -> atan and 1/sqrt(p - q x^2) -> asin, for rational p, q > 0.
  std::optional<Expr> inverse_trig(const Expr& b, const Rational& k) {
    const Expr x = var_x();
    Expr d1 = differentiate(b, Symbol::x);
    Expr d2 = differentiate(d1, Symbol::x);
    auto two_q = rational_value(d2);
    if (!two_q) return std::nullopt;
    auto slope_at_0 = rational_value(simplify(substitute(d1, Symbol::x, num(0))));
    auto at_0 = rational_value(simplify(substitute(b, Symbol::x, num(0))));
    if (!slope_at_0 || *slope_at_0 != 0 || !at_0) return std::nullopt;
    Rational p = *at_0;
    Rational q = *two_q / 2;
    if (p <= 0) return std::nullopt;
    if (k == -1 && q > 0) {
      Expr scale = sqrt(rational_expr(q / p));
      return div(atan(mul(scale, x)), sqrt(rational_expr(p * q)));
    }
    if (k == Rational(-1, 2) && q < 0) {
      Rational m = -q;
      return div(asin(mul(sqrt(rational_expr(m / p)), x)), sqrt(rational_expr(m)));
    }
    return std::nullopt;
  }

  // f(u(x)) u'(x) -> F(u).
  std::optional<Expr> substitution(const std::vector<Factor>& fs) {
    if (fs.size() < 2) return std::nullopt;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      std::vector<Factor> rest;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != i) rest.push_back(fs[j]);
      const Expr& b = fs[i].base;
      const Expr& e = fs[i].exponent;
      std::vector<std::pair<Expr, Expr>> candidates;  // (u, F(u))
      if (!contains(e, Symbol::x)) {
        auto k = rational_value(e);
        if (k && *k == -1)
          candidates.emplace_back(b, ln(b));
        else
          candidates.emplace_back(b, div(pow(b, simp_.plus(e, num(1))), simp_.plus(e, num(1))));
        if (k && *k == 1 && b.is_apply() && b.arity() == 1)
          if (auto prim = table(b.op(), b.child(0))) candidates.emplace_back(b.child(0), *prim);
      } else if (!contains(b, Symbol::x)) {
        candidates.emplace_back(e, div(pow(b, e), ln(b)));
      }
      for (auto& [u, prim] : candidates) {
        Expr du = differentiate(u, Symbol::x);
        if (is_zero(du)) continue;
        SimplifyResult ratio = simplify_ex(div(product_expr(rest), du));
        if (!ratio.truncated && !contains(ratio.expr, Symbol::x)) return d_mul(ratio.expr, prim);
      }
    }
    return std::nullopt;
  }

  // Preference for the differentiated factor u: 1 for logarithms and
  // inverse trigonometric functions, 2 for polynomial factors, 0 if unsuitable.
  static int parts_rank(const Factor& f) {
    auto k = rational_value(f.exponent);
    if (k && *k == 1 && f.base.is_apply() &&
        (f.base.is_op(Op::ln) || f.base.is_op(Op::atan) || f.base.is_op(Op::asin) ||
         f.base.is_op(Op::acos)))
      return 1;
    bool poly = f.base.is_symbol(Symbol::x) || f.base.is_op(Op::add) || f.base.is_op(Op::sub);
    if (poly && k && is_integral(*k) && *k > 0) return 2;
    return 0;
  }

  // int u dv = u v - int v du, with u drawn from polynomial or inverse factors.
  std::optional<Expr> parts(const std::vector<Factor>& fs, int depth) {
    if (depth >= opts_.max_parts_depth) return std::nullopt;
    std::vector<std::size_t> order;
    for (int rank = 1; rank <= 2; ++rank)
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (parts_rank(fs[i]) == rank) order.push_back(i);
    for (std::size_t i : order) {
      std::vector<Factor> rest;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != i) rest.push_back(fs[j]);
      Expr u = product_expr({fs[i]});
      Expr dv = product_expr(rest);
      std::optional<Expr> v = rest.empty() ? std::optional<Expr>(var_x())
                                           : integrate(dv, opts_.max_parts_depth);
      if (!v) continue;
      Expr vs = simplify(*v);
      Expr du = differentiate(u, Symbol::x);
      auto inner = integrate(simplify(mul(du, vs)), depth + 1);
      if (!inner) continue;
      return d_sub(mul(u, vs), *inner);
    }
    return std::nullopt;
  }

  std::optional<Expr> expanded(const std::vector<Factor>& fs, int depth) {
    bool has_sum = false;
    for (const auto& f : fs) {
      auto k = rational_value(f.exponent);
      if ((f.base.is_op(Op::add) || f.base.is_op(Op::sub)) && k && is_integral(*k) && *k > 0)
        has_sum = true;
    }
    if (!has_sum) return std::nullopt;
    Expr original = product_expr(fs);
    auto g = Expander(opts_.max_expanded_terms).run(original);
    if (!g || *g == original || !(g->is_op(Op::add) || g->is_op(Op::sub))) return std::nullopt;
    return integrate(*g, depth);
  }

  IntegrateOptions opts_;
  Simplifier simp_{SimplifyOptions{1u << 20}};
  int calls_ = 0;
};

}  // namespace detail

// Expands products of sums and small integer powers of sums.
inline Expr expand(const Expr& e, std::size_t max_terms = 64) {
  Expr s = simplify(e);
  auto r = detail::Expander(max_terms).run(s);
  return r ? *r : s;
}

// Antiderivative of e with respect to x, or nullopt when no rule applies.
inline std::optional<Primitive> integrate_rule_based(const Expr& e, Symbol v = Symbol::x,
                                                     IntegrateOptions opts = {}) {
  if (v != Symbol::x) throw std::invalid_argument("integrate_rule_based: only x is supported");
  SimplifyResult f = simplify_ex(e);
  if (f.truncated) return std::nullopt;
  detail::Integrator engine(opts);
  auto raw = engine.integrate(f.expr, 0);
  if (!raw) return std::nullopt;
  SimplifyResult anti = simplify_ex(*raw);
  if (anti.truncated) return std::nullopt;
  if (!check_equiv(differentiate(anti.expr, Symbol::x), f.expr).equivalent()) return std::nullopt;
  return Primitive{e, anti.expr};
}

}  // namespace symforge
