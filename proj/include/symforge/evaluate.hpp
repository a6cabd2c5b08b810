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

// Real-valued evaluation of expressions at a point.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "symforge/expr.hpp"

namespace symforge {

// Bindings for the symbols x, y, y1, y2, c, c1, c2.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<std::pair<Symbol, double>> init) {
    for (auto [s, v] : init) set(s, v);
  }

  Point& set(Symbol s, double v) {
    if (is_numeric_constant(s))
      throw std::invalid_argument("cannot bind constant '" + std::string(symbol_name(s)) + "'");
    values_[index(s)] = v;
    return *this;
  }
  std::optional<double> get(Symbol s) const { return values_[index(s)]; }
  bool has(Symbol s) const { return values_[index(s)].has_value(); }

 private:
  static std::size_t index(Symbol s) { return static_cast<std::size_t>(s); }
  std::array<std::optional<double>, kAllSymbols.size()> values_{};
};

enum class EvalFault { none, domain, unbound };

struct EvalResult {
  double value = 0.0;
  EvalFault fault = EvalFault::none;
  // The offending sub-node when fault != none.
  std::optional<Expr> where;
  // Largest magnitude among all intermediate values; a conditioning hint.
  double magnitude = 0.0;

  bool ok() const { return fault == EvalFault::none; }
};

class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, Expr where)
      : std::domain_error(what), where_(std::move(where)) {}
  const Expr& where() const { return where_; }

 private:
  Expr where_;
};

class UnboundSymbolError : public std::invalid_argument {
 public:
  explicit UnboundSymbolError(Symbol s)
      : std::invalid_argument("unbound symbol '" + std::string(symbol_name(s)) + "'"),
        symbol_(s) {}
  Symbol symbol() const { return symbol_; }

 private:
  Symbol symbol_;
};

namespace detail {

struct Evaluator {
  const Point& point;
  EvalResult& out;

  bool fail(EvalFault f, const Expr& e) {
    out.fault = f;
    out.where = e;
    return false;
  }

  bool track(double v, const Expr& e) {
    if (!std::isfinite(v)) return fail(EvalFault::domain, e);
    out.magnitude = std::max(out.magnitude, std::abs(v));
    return true;
  }

  bool run(const Expr& e, double& v) {
    switch (e.kind()) {
      case NodeKind::integer:
        v = e.value().convert_to<double>();
        return track(v, e);
      case NodeKind::symbol:
        if (e.symbol() == Symbol::pi) {
          v = std::numbers::pi;
          return true;
        }
        if (e.symbol() == Symbol::ee) {
          v = std::numbers::e;
          return true;
        }
        if (auto b = point.get(e.symbol())) {
          v = *b;
          return track(v, e);
        }
        return fail(EvalFault::unbound, e);
      case NodeKind::apply:
        break;
    }
    double a = 0.0;
    if (!run(e.child(0), a)) return false;
    if (e.arity() == 2) {
      double b = 0.0;
      if (!run(e.child(1), b)) return false;
      switch (e.op()) {
        case Op::add: v = a + b; break;
        case Op::sub: v = a - b; break;
        case Op::mul: v = a * b; break;
        case Op::div:
          if (b == 0.0) return fail(EvalFault::domain, e);
          v = a / b;
          break;
        case Op::pow:
          if (a == 0.0 && b < 0.0) return fail(EvalFault::domain, e);
          v = std::pow(a, b);
          break;
        default: break;
      }
      return track(v, e);
    }
    switch (e.op()) {
      case Op::neg: v = -a; break;
      case Op::exp: v = std::exp(a); break;
      case Op::ln:
        if (a <= 0.0) return fail(EvalFault::domain, e);
        v = std::log(a);
        break;
      case Op::sqrt:
        if (a < 0.0) return fail(EvalFault::domain, e);
        v = std::sqrt(a);
        break;
      case Op::sin: v = std::sin(a); break;
      case Op::cos: v = std::cos(a); break;
      case Op::tan: v = std::tan(a); break;
      case Op::asin:
        if (a < -1.0 || a > 1.0) return fail(EvalFault::domain, e);
        v = std::asin(a);
        break;
      case Op::acos:
        if (a < -1.0 || a > 1.0) return fail(EvalFault::domain, e);
        v = std::acos(a);
        break;
      case Op::atan: v = std::atan(a); break;
      default: break;
    }
    return track(v, e);
  }
};

}  // namespace detail

// Non-throwing evaluation; faults are reported in the result.
inline EvalResult try_evaluate(const Expr& e, const Point& p) {
  EvalResult out;
  double v = 0.0;
  if (detail::Evaluator{p, out}.run(e, v)) out.value = v;
  return out;
}

// Throws DomainError or UnboundSymbolError.
inline double evaluate(const Expr& e, const Point& p) {
  EvalResult r = try_evaluate(e, p);
  switch (r.fault) {
    case EvalFault::none:
      return r.value;
    case EvalFault::domain:
      throw DomainError("value leaves the reals at '" + to_infix(*r.where) + "'", *r.where);
    case EvalFault::unbound:
      throw UnboundSymbolError(r.where->symbol());
  }
  return r.value;
}

}  // namespace symforge
