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

// Symbolic differentiation and inversion of equations along the path to a
// single leaf.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "symforge/expr.hpp"
#include "symforge/simplify.hpp"

namespace symforge {

struct DiffOptions {
  // Treat y as y(x) when differentiating with respect to x: y' = y1 and
  // y1' = y2.
  bool y_depends_on_x = false;
};

namespace detail {

inline bool is_zero(const Expr& e) { return e.is_integer() && e.value() == 0; }
inline bool is_unit(const Expr& e) { return e.is_integer() && e.value() == 1; }

// Light peephole constructors; full normalization happens once at the end.
inline Expr d_add(Expr a, Expr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return add(std::move(a), std::move(b));
}
inline Expr d_sub(Expr a, Expr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return neg(std::move(b));
  return sub(std::move(a), std::move(b));
}
inline Expr d_mul(Expr a, Expr b) {
  if (is_zero(a) || is_zero(b)) return num(0);
  if (is_unit(a)) return b;
  if (is_unit(b)) return a;
  return mul(std::move(a), std::move(b));
}
inline Expr d_div(Expr a, Expr b) {
  if (is_zero(a)) return num(0);
  if (is_unit(b)) return a;
  return div(std::move(a), std::move(b));
}

class Differentiator {
 public:
  Differentiator(Symbol v, DiffOptions opts) : v_(v), opts_(opts) {}

  bool depends(const Expr& e) const {
    if (contains(e, v_)) return true;
    if (opts_.y_depends_on_x && v_ == Symbol::x)
      return contains(e, Symbol::y) || contains(e, Symbol::y1) || contains(e, Symbol::y2);
    return false;
  }

  Expr run(const Expr& e) const {
    if (e.is_integer()) return num(0);
    if (e.is_symbol()) return leaf(e.symbol());
    if (!depends(e)) return num(0);
    const Expr& a = e.child(0);
    if (e.arity() == 2) {
      const Expr& b = e.child(1);
      switch (e.op()) {
        case Op::add: return d_add(run(a), run(b));
        case Op::sub: return d_sub(run(a), run(b));
        case Op::mul: return d_add(d_mul(run(a), b), d_mul(a, run(b)));
        case Op::div:
          return d_div(d_sub(d_mul(run(a), b), d_mul(a, run(b))), pow(b, num(2)));
        case Op::pow: {
          bool base_varies = depends(a);
          bool exp_varies = depends(b);
          if (!exp_varies)
            return d_mul(d_mul(b, pow(a, sub(b, num(1)))), run(a));
          if (!base_varies) return d_mul(d_mul(e, ln(a)), run(b));
          return d_mul(e, d_add(d_mul(run(b), ln(a)), d_div(d_mul(b, run(a)), a)));
        }
        default: break;
      }
    }
    Expr da = run(a);
    switch (e.op()) {
      case Op::neg: return is_zero(da) ? num(0) : neg(da);
      case Op::exp: return d_mul(e, da);
      case Op::ln: return d_div(da, a);
      case Op::sqrt: return d_div(da, mul(num(2), e));
      case Op::sin: return d_mul(cos(a), da);
      case Op::cos: return d_mul(neg(sin(a)), da);
      case Op::tan: return d_div(da, pow(cos(a), num(2)));
      case Op::asin: return d_div(da, sqrt(sub(num(1), pow(a, num(2)))));
      case Op::acos: return is_zero(da) ? num(0) : neg(d_div(da, sqrt(sub(num(1), pow(a, num(2))))));
      case Op::atan: return d_div(da, add(num(1), pow(a, num(2))));
      default: break;
    }
    throw std::logic_error("differentiate: unhandled operator");
  }

 private:
  Expr leaf(Symbol s) const {
    if (s == v_) return num(1);
    if (opts_.y_depends_on_x && v_ == Symbol::x) {
      if (s == Symbol::y) return sym(Symbol::y1);
      if (s == Symbol::y1) return sym(Symbol::y2);
      if (s == Symbol::y2)
        throw std::invalid_argument("differentiate: third derivative of y is not representable");
    }
    return num(0);
  }

  Symbol v_;
  DiffOptions opts_;
};

}  // namespace detail

// Unsimplified derivative; exposed for tests and internal composition.
inline Expr differentiate_raw(const Expr& e, Symbol v, DiffOptions opts = {}) {
  if (is_numeric_constant(v))
    throw std::invalid_argument("cannot differentiate with respect to a constant");
  return detail::Differentiator(v, opts).run(e);
}

// Derivative of e with respect to v, in normal form.
inline Expr differentiate(const Expr& e, Symbol v, DiffOptions opts = {}) {
  return simplify(differentiate_raw(e, v, opts));
}

// d/dx with y, y1 as functions of x.
inline Expr total_derivative(const Expr& e) {
  return differentiate(e, Symbol::x, DiffOptions{.y_depends_on_x = true});
}

// ---------------------------------------------------------------------------
// Leaf isolation.

struct IsolationResult {
  // Right-hand side with the target eliminated: target = isolated.
  Expr isolated;
  int steps = 0;
};

// Solves lhs = rhs for a target occurring exactly once in rhs and never in
// lhs, inverting each operation on the root-to-target path. Inverse
// trigonometric steps use principal branches. Returns nullopt when the
// precondition fails (the target is absent, repeated, or on the left).
inline std::optional<IsolationResult> isolate_leaf(const Expr& lhs, const Expr& rhs,
                                                   Symbol target) {
  if (contains(lhs, target) || count_symbol(rhs, target) != 1) return std::nullopt;
  Expr acc = lhs;
  Expr node = rhs;
  int steps = 0;
  while (!node.is_symbol(target)) {
    ++steps;
    if (node.arity() == 1) {
      const Op op = node.op();
      switch (op) {
        case Op::neg: acc = neg(acc); break;
        case Op::exp: acc = ln(acc); break;
        case Op::ln: acc = exp(acc); break;
        case Op::sqrt: acc = pow(acc, num(2)); break;
        case Op::sin: acc = asin(acc); break;
        case Op::cos: acc = acos(acc); break;
        case Op::tan: acc = atan(acc); break;
        case Op::asin: acc = sin(acc); break;
        case Op::acos: acc = cos(acc); break;
        case Op::atan: acc = tan(acc); break;
        default: return std::nullopt;
      }
      node = node.child(0);
      continue;
    }
    const bool in_left = contains(node.lhs(), target);
    const Expr& other = in_left ? node.rhs() : node.lhs();
    switch (node.op()) {
      case Op::add: acc = sub(acc, other); break;
      case Op::sub: acc = in_left ? add(acc, other) : sub(other, acc); break;
      case Op::mul: acc = div(acc, other); break;
      case Op::div: acc = in_left ? mul(acc, other) : div(other, acc); break;
      case Op::pow:
        if (in_left) {
          auto k = rational_value(simplify(other));
          if (k && *k == 0) return std::nullopt;
          acc = (k && *k == 1) ? acc : pow(acc, div(num(1), other));
        } else {
          acc = div(ln(acc), ln(other));
        }
        break;
      default: return std::nullopt;
    }
    node = in_left ? node.lhs() : node.rhs();
  }
  return IsolationResult{simplify(acc), steps};
}

}  // namespace symforge
