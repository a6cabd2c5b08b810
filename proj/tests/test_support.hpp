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

// Shared helpers for the test suites.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "symforge/evaluate.hpp"
#include "symforge/expr.hpp"
#include "symforge/random.hpp"
#include "symforge/sampler.hpp"

namespace symforge::testing {

// A stream of decorated random expressions cycling through every preset.
class ExprStream {
 public:
  ExprStream(std::uint64_t seed, int min_ops, int max_ops) : rng_(seed ^ 0xabcdef) {
    for (const char* name : {"uniform", "poly_dominant", "trig_dominant", "log_dominant"}) {
      GenProfile p = GenProfile::preset(name);
      p.min_ops = min_ops;
      p.max_ops = max_ops;
      samplers_.emplace_back(p, seed++);
    }
  }

  Expr next() { return samplers_[i_++ % samplers_.size()].sample(); }

 private:
  Rng rng_;
  std::vector<Sampler> samplers_;
  std::size_t i_ = 0;
};

// A point binding x (and the ODE constants) drawn from [-lo_hi, lo_hi].
inline Point random_point(Rng& rng, double lo_hi = 5.0) {
  Point p;
  for (Symbol s : {Symbol::x, Symbol::y, Symbol::c, Symbol::c1, Symbol::c2})
    p.set(s, uniform_real(rng, -lo_hi, lo_hi));
  return p;
}

// Extended-precision evaluation used to flag ill-conditioned points.
inline std::optional<long double> evaluate_long(const Expr& e, const Point& p) {
  using L = long double;
  switch (e.kind()) {
    case NodeKind::integer:
      return static_cast<L>(e.value().convert_to<double>());
    case NodeKind::symbol:
      if (e.symbol() == Symbol::pi) return 3.141592653589793238462643383279502884L;
      if (e.symbol() == Symbol::ee) return 2.718281828459045235360287471352662498L;
      if (auto v = p.get(e.symbol())) return static_cast<L>(*v);
      return std::nullopt;
    case NodeKind::apply:
      break;
  }
  auto a = evaluate_long(e.child(0), p);
  if (!a) return std::nullopt;
  std::optional<L> b;
  if (e.arity() == 2) {
    b = evaluate_long(e.child(1), p);
    if (!b) return std::nullopt;
  }
  L r = 0;
  switch (e.op()) {
    case Op::add: r = *a + *b; break;
    case Op::sub: r = *a - *b; break;
    case Op::mul: r = *a * *b; break;
    case Op::div: if (*b == 0) return std::nullopt; r = *a / *b; break;
    case Op::pow: r = std::pow(*a, *b); break;
    case Op::neg: r = -*a; break;
    case Op::exp: r = std::exp(*a); break;
    case Op::ln: if (*a <= 0) return std::nullopt; r = std::log(*a); break;
    case Op::sqrt: if (*a < 0) return std::nullopt; r = std::sqrt(*a); break;
    case Op::sin: r = std::sin(*a); break;
    case Op::cos: r = std::cos(*a); break;
    case Op::tan: r = std::tan(*a); break;
    case Op::asin: r = std::asin(*a); break;
    case Op::acos: r = std::acos(*a); break;
    case Op::atan: r = std::atan(*a); break;
  }
  if (!std::isfinite(r)) return std::nullopt;
  return r;
}

// True when double evaluation of e at p agrees with extended precision.
inline bool well_conditioned(const Expr& e, const Point& p, double value) {
  auto ref = evaluate_long(e, p);
  if (!ref) return false;
  return std::abs(static_cast<long double>(value) - *ref) <= 1e-12L * (1 + std::abs(*ref));
}

}  // namespace symforge::testing
