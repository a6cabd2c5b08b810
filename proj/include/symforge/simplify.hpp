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

// Rule-based simplifier producing a canonical normal form.
//
// Sums are flattened into a rational constant plus rational multiples of
// monomials; products into a rational coefficient times base^exponent
// factors. Both are rebuilt in a fixed order, so re-simplifying a normal form
// reproduces it exactly. Rewrites such as x/x -> 1 are applied without
// domain side conditions: the result agrees with the input wherever both are
// defined.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "symforge/expr.hpp"

namespace symforge {

struct SimplifyOptions {
  // Budget of node visits; once spent, rewriting stops and the partially
  // simplified tree is returned.
  std::size_t max_visits = 10000;
};

struct SimplifyResult {
  Expr expr;
  bool truncated = false;
  std::size_t visits = 0;
};

namespace detail {

inline std::optional<Rational> as_rational(const Expr& e) {
  if (e.is_integer()) return Rational(e.value());
  if (e.is_op(Op::div) && e.lhs().is_integer() && e.rhs().is_integer() &&
      e.rhs().value() != 0)
    return Rational(e.lhs().value(), e.rhs().value());
  if (e.is_op(Op::neg))
    if (auto r = as_rational(e.child(0))) return -*r;
  return std::nullopt;
}

inline Expr rational_expr(const Rational& r) {
  const BigInt& n = boost::multiprecision::numerator(r);
  const BigInt& d = boost::multiprecision::denominator(r);
  if (d == 1) return num(n);
  return div(num(n), num(d));
}

inline bool is_integral(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

// Exact integer k-th root of v >= 0, if one exists.
inline std::optional<BigInt> exact_root(const BigInt& v, unsigned k) {
  if (v < 0) return std::nullopt;
  if (v < 2 || k == 1) return v;
  BigInt lo = 0;
  BigInt hi = BigInt(1) << (boost::multiprecision::msb(v) / k + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= v)
      lo = mid;
    else
      hi = mid - 1;
  }
  if (boost::multiprecision::pow(lo, k) == v) return lo;
  return std::nullopt;
}

inline constexpr unsigned kMaxFoldBits = 256;

// r^n for integer n, refusing results wider than kMaxFoldBits.
inline std::optional<Rational> rational_pow(const Rational& r, const BigInt& n) {
  if (r == 0 && n < 0) return std::nullopt;
  if (r == 0) return n == 0 ? Rational(1) : Rational(0);
  if (r == 1) return Rational(1);
  if (r == -1) return (n % 2 == 0) ? Rational(1) : Rational(-1);
  BigInt mag = n < 0 ? BigInt(-n) : n;
  const BigInt& rn = boost::multiprecision::numerator(r);
  const BigInt& rd = boost::multiprecision::denominator(r);
  std::size_t width =
      std::max(boost::multiprecision::msb(boost::multiprecision::abs(rn)),
               boost::multiprecision::msb(rd)) +
      1;
  if (mag > kMaxFoldBits || width * mag.convert_to<std::size_t>() > kMaxFoldBits)
    return std::nullopt;
  unsigned k = mag.convert_to<unsigned>();
  Rational out(boost::multiprecision::pow(rn, k), boost::multiprecision::pow(rd, k));
  if (n < 0) out = 1 / out;
  return out;
}

struct Factor {
  Expr base;
  Expr exponent;
};

struct ProductForm {
  Rational coef{1};
  std::vector<Factor> factors;
};

struct Term {
  Rational coef;
  std::vector<Factor> factors;
};

struct SumForm {
  Rational constant{0};
  std::map<Expr, Term, ExprLess> terms;  // monomial -> term
};

class Simplifier {
 public:
  explicit Simplifier(SimplifyOptions opts) : opts_(opts) {}

  Expr run(const Expr& e) {
    if (!spend()) return e;
    if (e.is_leaf()) return e;
    if (e.arity() == 1) {
      Expr a = run(e.child(0));
      if (truncated_) return Expr::apply(e.op(), a);
      return unary(e.op(), a);
    }
    Expr a = run(e.child(0));
    Expr b = run(e.child(1));
    if (truncated_) return Expr::apply(e.op(), a, b);
    return binary(e.op(), a, b);
  }

  bool truncated() const { return truncated_; }
  std::size_t visits() const { return visits_; }

  // ---- operations on normal forms ----

  Expr binary(Op op, const Expr& a, const Expr& b) {
    switch (op) {
      case Op::add: {
        SumForm s = sum_of(a);
        accumulate(s, b, Rational(1));
        return build_sum(std::move(s));
      }
      case Op::sub: {
        SumForm s = sum_of(a);
        accumulate(s, b, Rational(-1));
        return build_sum(std::move(s));
      }
      case Op::mul: {
        ProductForm p = product_of(a);
        append(p, product_of(b));
        return build_product(std::move(p));
      }
      case Op::div: {
        ProductForm p = product_of(a);
        append(p, invert(product_of(b)));
        return build_product(std::move(p));
      }
      case Op::pow:
        return power(a, b);
      default:
        break;
    }
    return Expr::apply(op, a, b);
  }

  Expr unary(Op op, const Expr& a) {
    auto r = as_rational(a);
    switch (op) {
      case Op::neg:
        return scale(a, Rational(-1));
      case Op::sqrt:
        return power(a, rational_expr(Rational(1, 2)));
      case Op::exp:
        if (r && *r == 0) return num(1);
        if (a.is_op(Op::ln)) return a.child(0);
        return exp(a);
      case Op::ln:
        if (r && *r == 1) return num(0);
        if (a.is_op(Op::exp)) return a.child(0);
        if (a.is_symbol(Symbol::ee)) return num(1);
        return ln(a);
      case Op::sin:
      case Op::tan:
      case Op::asin:
      case Op::atan:
        if (r && *r == 0) return num(0);
        if (is_negative(a)) return scale(Expr::apply(op, scale(a, Rational(-1))), Rational(-1));
        return Expr::apply(op, a);
      case Op::cos:
        if (r && *r == 0) return num(1);
        if (is_negative(a)) return cos(scale(a, Rational(-1)));
        return cos(a);
      case Op::acos:
        if (r && *r == 1) return num(0);
        return acos(a);
      default:
        break;
    }
    return Expr::apply(op, a);
  }

  Expr scale(const Expr& e, const Rational& k) {
    ProductForm p = product_of(e);
    p.coef *= k;
    return build_product(std::move(p));
  }

  Expr plus(const Expr& a, const Expr& b) {
    auto ra = as_rational(a);
    auto rb = as_rational(b);
    if (ra && rb) return rational_expr(*ra + *rb);
    return binary(Op::add, a, b);
  }

  Expr power(const Expr& base, const Expr& exponent) {
    if (auto r = as_rational(exponent)) {
      if (*r == 0) return num(1);
      if (*r == 1) return base;
    }
    if (auto rb = as_rational(base); rb && *rb == 1) return num(1);
    ProductForm p;
    p.factors.push_back({base, exponent});
    return build_product(std::move(p));
  }

  bool is_negative(const Expr& e) {
    if (auto r = as_rational(e)) return *r < 0;
    if (e.is_op(Op::add) || e.is_op(Op::sub)) {
      SumForm s = sum_of(e);
      if (s.constant != 0) return s.constant < 0;
      if (!s.terms.empty()) return s.terms.begin()->second.coef < 0;
      return false;
    }
    return product_of(e).coef < 0;
  }

  // ---- sums ----

  SumForm sum_of(const Expr& e) {
    SumForm s;
    accumulate(s, e, Rational(1));
    return s;
  }

  void accumulate(SumForm& s, const Expr& e, const Rational& k) {
    if (auto r = as_rational(e)) {
      s.constant += k * *r;
      return;
    }
    if (e.is_op(Op::add)) {
      accumulate(s, e.lhs(), k);
      accumulate(s, e.rhs(), k);
      return;
    }
    if (e.is_op(Op::sub)) {
      accumulate(s, e.lhs(), k);
      accumulate(s, e.rhs(), -k);
      return;
    }
    if (e.is_op(Op::neg)) {
      accumulate(s, e.child(0), -k);
      return;
    }
    ProductForm p = product_of(e);
    if (p.factors.size() == 1 && is_one(p.factors[0].exponent) &&
        (p.factors[0].base.is_op(Op::add) || p.factors[0].base.is_op(Op::sub))) {
      accumulate(s, p.factors[0].base, k * p.coef);
      return;
    }
    Expr mono = from_product(Rational(1), p.factors);
    auto [it, inserted] = s.terms.try_emplace(mono, Term{k * p.coef, p.factors});
    if (!inserted) it->second.coef += k * p.coef;
  }

  Expr build_sum(SumForm s) {
    spend();
    for (const auto& [mono, term] : s.terms)
      for (const auto& f : term.factors)
        if (term.coef != 0 && is_division_by_zero(f)) return undefined();
    std::vector<const Term*> terms;
    for (const auto& [mono, term] : s.terms)
      if (term.coef != 0) terms.push_back(&term);
    // Without a constant, the first positive term leads.
    if (s.constant == 0) {
      auto lead = std::find_if(terms.begin(), terms.end(),
                               [](const Term* t) { return t->coef > 0; });
      if (lead != terms.end()) std::rotate(terms.begin(), lead, lead + 1);
    }
    std::vector<Expr> parts;
    std::vector<bool> negative;
    if (s.constant != 0) {
      parts.push_back(rational_expr(s.constant));
      negative.push_back(false);
    }
    for (const Term* term : terms) {
      bool neg_term = !parts.empty() && term->coef < 0;
      parts.push_back(from_product(neg_term ? -term->coef : term->coef, term->factors));
      negative.push_back(neg_term);
    }
    if (parts.empty()) return num(0);
    Expr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i)
      acc = negative[i] ? sub(acc, parts[i]) : add(acc, parts[i]);
    return acc;
  }

  // ---- products ----

  ProductForm product_of(const Expr& e) {
    ProductForm p;
    collect(p, e);
    return p;
  }

  void collect(ProductForm& p, const Expr& e) {
    if (auto r = as_rational(e)) {
      p.coef *= *r;
      return;
    }
    if (e.is_op(Op::mul)) {
      collect(p, e.lhs());
      collect(p, e.rhs());
      return;
    }
    if (e.is_op(Op::div)) {
      collect(p, e.lhs());
      append(p, invert(product_of(e.rhs())));
      return;
    }
    if (e.is_op(Op::neg)) {
      p.coef = -p.coef;
      collect(p, e.child(0));
      return;
    }
    if (e.is_op(Op::pow)) {
      p.factors.push_back({e.lhs(), e.rhs()});
      return;
    }
    if (e.is_op(Op::sqrt)) {
      p.factors.push_back({e.child(0), rational_expr(Rational(1, 2))});
      return;
    }
    p.factors.push_back({e, num(1)});
  }

  void append(ProductForm& p, ProductForm q) {
    p.coef *= q.coef;
    for (auto& f : q.factors) p.factors.push_back(std::move(f));
  }

  ProductForm invert(ProductForm p) {
    if (p.coef == 0) {
      // Division by a literal zero survives as an explicit 0^-1 factor.
      p.coef = 1;
      p.factors.push_back({num(0), num(-1)});
      return p;
    }
    p.coef = 1 / p.coef;
    for (auto& f : p.factors) f.exponent = scale_exponent(f.exponent, Rational(-1));
    return p;
  }

  Expr scale_exponent(const Expr& e, const Rational& k) {
    if (auto r = as_rational(e)) return rational_expr(*r * k);
    return scale(e, k);
  }

  Expr multiply_exponents(const Expr& a, const Expr& b) {
    auto ra = as_rational(a);
    auto rb = as_rational(b);
    if (ra && rb) return rational_expr(*ra * *rb);
    if (rb) return scale(a, *rb);
    if (ra) return scale(b, *ra);
    return binary(Op::mul, a, b);
  }

  static bool is_one(const Expr& e) {
    auto r = as_rational(e);
    return r && *r == 1;
  }

  static bool is_product_like(const Expr& e) {
    return e.is_op(Op::mul) || e.is_op(Op::div) || e.is_op(Op::neg) ||
           e.is_op(Op::pow) || e.is_op(Op::sqrt);
  }

  Expr build_product(ProductForm p) {
    spend();
    if (p.coef == 0) return num(0);

    // Expand factors whose base is itself a product raised to an integer.
    std::vector<Factor> pending = std::move(p.factors);
    std::map<Expr, Expr, ExprLess> grouped;
    for (int round = 0; !pending.empty() && round < 64; ++round) {
      std::vector<Factor> next;
      std::vector<Expr> touched;
      for (auto& f : pending) {
        auto re = as_rational(f.exponent);
        bool integral = re && is_integral(*re);
        if (integral && (is_product_like(f.base) || as_rational(f.base))) {
          ProductForm inner = product_of(f.base);
          if (auto c = rational_pow(inner.coef, boost::multiprecision::numerator(*re))) {
            p.coef *= *c;
            for (auto& g : inner.factors)
              next.push_back({g.base, multiply_exponents(g.exponent, f.exponent)});
            continue;
          }
        }
        auto [it, inserted] = grouped.try_emplace(f.base, f.exponent);
        if (!inserted) {
          it->second = plus(it->second, f.exponent);
          touched.push_back(f.base);
        }
      }
      pending = std::move(next);
      // Merged exponents may have become integral; re-examine those groups.
      for (const auto& base : touched) {
        auto it = grouped.find(base);
        if (it == grouped.end()) continue;
        auto re = as_rational(it->second);
        if (re && is_integral(*re) && *re != 0 &&
            (is_product_like(it->first) || as_rational(it->first))) {
          pending.push_back({it->first, it->second});
          grouped.erase(it);
        }
      }
      if (!pending.empty() && round == 63) {
        for (auto& f : pending) grouped.try_emplace(f.base, f.exponent);
        pending.clear();
      }
    }
    if (p.coef == 0) return num(0);

    std::vector<Factor> factors;
    for (auto& [base, exponent] : grouped) {
      auto re = as_rational(exponent);
      if (re && *re == 0) continue;
      if (auto rb = as_rational(base)) {
        if (*rb == 1) continue;
        if (re && !is_integral(*re) && *rb > 0) {
          if (auto folded = fold_rational_root(*rb, *re)) {
            p.coef *= *folded;
            continue;
          }
        }
      }
      factors.push_back({base, exponent});
    }
    merge_exponentials(factors);
    if (p.coef == 0) return num(0);
    for (const auto& f : factors)
      if (is_division_by_zero(f)) return undefined();

    if (p.coef != 1 && factors.size() == 1 && is_one(factors[0].exponent) &&
        (factors[0].base.is_op(Op::add) || factors[0].base.is_op(Op::sub))) {
      SumForm s;
      accumulate(s, factors[0].base, p.coef);
      return build_sum(std::move(s));
    }
    return from_product(p.coef, factors);
  }

  // Anything divided by literal zero collapses to the single form 1/0.
  static bool is_division_by_zero(const Factor& f) {
    auto re = as_rational(f.exponent);
    return f.base.is_integer(0) && re && *re < 0;
  }
  static Expr undefined() { return div(num(1), num(0)); }

  // exp(u)^a * exp(v)^b -> exp(a u + b v) for rational a and b.
  void merge_exponentials(std::vector<Factor>& factors) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < factors.size(); ++i)
      if (factors[i].base.is_op(Op::exp) && as_rational(factors[i].exponent)) idx.push_back(i);
    if (idx.size() < 2) return;
    SumForm s;
    for (auto i : idx) accumulate(s, factors[i].base.child(0), *as_rational(factors[i].exponent));
    Expr merged = unary(Op::exp, build_sum(std::move(s)));
    auto one = as_rational(merged);
    if (!merged.is_op(Op::exp) && !(one && *one == 1)) return;
    std::vector<Factor> rest;
    for (std::size_t i = 0, k = 0; i < factors.size(); ++i) {
      if (k < idx.size() && idx[k] == i) {
        ++k;
        continue;
      }
      if (structural_equal(factors[i].base, merged)) return;
      rest.push_back(factors[i]);
    }
    if (!one) {
      auto pos = std::lower_bound(rest.begin(), rest.end(), merged,
                                  [](const Factor& f, const Expr& e) { return ExprLess{}(f.base, e); });
      rest.insert(pos, Factor{merged, num(1)});
    }
    factors = std::move(rest);
  }

  // b^(p/q) for b > 0 when b has an exact q-th root.
  static std::optional<Rational> fold_rational_root(const Rational& b, const Rational& e) {
    const BigInt& q = boost::multiprecision::denominator(e);
    if (q > 64) return std::nullopt;
    unsigned k = q.convert_to<unsigned>();
    auto rn = exact_root(boost::multiprecision::numerator(b), k);
    auto rd = exact_root(boost::multiprecision::denominator(b), k);
    if (!rn || !rd) return std::nullopt;
    return rational_pow(Rational(*rn, *rd), boost::multiprecision::numerator(e));
  }

  bool exponent_is_negative(const Expr& e) {
    if (auto r = as_rational(e)) return *r < 0;
    if (e.is_op(Op::add) || e.is_op(Op::sub)) return false;
    return product_of(e).coef < 0;
  }

  static Expr power_expr(const Expr& base, const Expr& exponent) {
    auto r = as_rational(exponent);
    if (r && *r == 1) return base;
    if (r && *r == Rational(1, 2)) return sqrt(base);
    return pow(base, exponent);
  }

  Expr from_product(const Rational& coef, const std::vector<Factor>& factors) {
    if (factors.empty()) return rational_expr(coef);
    bool negative = coef < 0;
    Rational mag = negative ? Rational(-coef) : coef;
    std::vector<Expr> top;
    std::vector<Expr> bottom;
    for (const auto& f : factors) {
      if (exponent_is_negative(f.exponent))
        bottom.push_back(power_expr(f.base, scale_exponent(f.exponent, Rational(-1))));
      else
        top.push_back(power_expr(f.base, f.exponent));
    }
    // An integer times a lone sum is distributed, matching what re-simplifying would do.
    auto side = [this](const BigInt& k, std::vector<Expr> xs) {
      if (k != 1 && xs.size() == 1 && (xs[0].is_op(Op::add) || xs[0].is_op(Op::sub))) {
        SumForm s;
        accumulate(s, xs[0], Rational(k));
        return build_sum(std::move(s));
      }
      if (xs.empty()) return num(k);
      Expr acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc = mul(acc, xs[i]);
      return k != 1 ? mul(num(k), acc) : acc;
    };
    const BigInt& d = boost::multiprecision::denominator(mag);
    Expr numer = side(boost::multiprecision::numerator(mag), std::move(top));
    Expr out = bottom.empty() && d == 1 ? numer : div(numer, side(d, std::move(bottom)));
    return negative ? neg(out) : out;
  }

 private:
  bool spend() {
    if (visits_ >= opts_.max_visits) {
      truncated_ = true;
      return false;
    }
    ++visits_;
    return true;
  }

  SimplifyOptions opts_;
  std::size_t visits_ = 0;
  bool truncated_ = false;
};

}  // namespace detail

inline SimplifyResult simplify_ex(const Expr& e, SimplifyOptions opts = {}) {
  detail::Simplifier s(opts);
  Expr out = s.run(e);
  return {std::move(out), s.truncated(), s.visits()};
}

inline Expr simplify(const Expr& e, SimplifyOptions opts = {}) {
  return simplify_ex(e, opts).expr;
}

// The rational value of a normal-form numeric literal, if e is one.
inline std::optional<Rational> rational_value(const Expr& e) { return detail::as_rational(e); }

}  // namespace symforge
