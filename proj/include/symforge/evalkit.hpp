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

// Equivalence checking between predicted and reference expressions.
//
// Pipeline: undecodable prediction -> not_equivalent; simplify(pred - ref)
// is 0 -> equivalent_symbolic; agreement at enough random valid points ->
// equivalent_numeric; optionally a constant difference ->
// equivalent_mod_constant; otherwise not_equivalent, or undecided when too
// few points could be evaluated.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symforge/calculus.hpp"
#include "symforge/codec.hpp"
#include "symforge/evaluate.hpp"
#include "symforge/expr.hpp"
#include "symforge/random.hpp"
#include "symforge/simplify.hpp"

namespace symforge {

enum class Verdict : std::uint8_t {
  equivalent_symbolic,
  equivalent_numeric,
  equivalent_mod_constant,
  not_equivalent,
  undecided,
};

inline constexpr std::array<Verdict, 5> kAllVerdicts = {
    Verdict::equivalent_symbolic, Verdict::equivalent_numeric, Verdict::equivalent_mod_constant,
    Verdict::not_equivalent, Verdict::undecided};

inline constexpr std::string_view verdict_name(Verdict v) {
  constexpr std::array<std::string_view, 5> names = {
      "equivalent_symbolic", "equivalent_numeric", "equivalent_mod_constant", "not_equivalent",
      "undecided"};
  return names[static_cast<std::size_t>(v)];
}

struct EquivVerdict {
  Verdict outcome = Verdict::undecided;
  std::string detail;

  bool equivalent() const {
    return outcome == Verdict::equivalent_symbolic || outcome == Verdict::equivalent_numeric ||
           outcome == Verdict::equivalent_mod_constant;
  }
};

struct EquivOptions {
  bool mod_constant = false;
  int min_points = 5;
  int max_attempts = 100;
  double lo = -10.0;
  double hi = 10.0;
  double rel_tol = 1e-6;
  // Largest spread of pred - ref still accepted as a constant offset.
  double constant_variance_tol = 1e-9;
  // Points whose intermediate values exceed this are too ill-conditioned to
  // be compared and are resampled.
  double max_magnitude = 1e15;
  std::uint64_t seed = 0x5eed5eedULL;
};

namespace detail {

// Random values for the given symbols. Half of the draws come from [-1, 1]
// so that functions with narrow domains (asin, acos) still get valid points.
inline Point random_point(Rng& rng, const std::vector<Symbol>& symbols, const EquivOptions& o) {
  Point p;
  for (Symbol s : symbols) {
    bool narrow = uniform_below(rng, 2) == 0;
    double lo = narrow ? std::max(o.lo, -1.0) : o.lo;
    double hi = narrow ? std::min(o.hi, 1.0) : o.hi;
    p.set(s, uniform_real(rng, lo, hi));
  }
  return p;
}

inline std::vector<Symbol> union_symbols(const Expr& a, const Expr& b) {
  std::vector<Symbol> out;
  for (Symbol s : kAllSymbols)
    if (!is_numeric_constant(s) && (contains(a, s) || contains(b, s))) out.push_back(s);
  return out;
}

// Floating-point cancellation inside an evaluation can cost up to about
// 1e-10 of its largest intermediate value.
inline double tolerance(double a, double b, double mag, double rel_tol) {
  return rel_tol * std::max({1.0, std::abs(a), std::abs(b)}) + 1e-10 * mag;
}

}  // namespace detail

inline EquivVerdict check_equiv(const Expr& pred, const Expr& ref, const EquivOptions& opts = {}) {
  SimplifyResult diff = simplify_ex(sub(pred, ref));
  if (!diff.truncated) {
    if (auto r = rational_value(diff.expr); r && *r == 0)
      return {Verdict::equivalent_symbolic, "difference simplifies to 0"};
  }

  const std::vector<Symbol> symbols = detail::union_symbols(pred, ref);
  Rng rng(opts.seed);
  std::vector<double> diffs;
  bool disagree = false;
  int attempts = 0;
  while (attempts < opts.max_attempts && static_cast<int>(diffs.size()) < opts.min_points) {
    ++attempts;
    Point p = detail::random_point(rng, symbols, opts);
    EvalResult a = try_evaluate(pred, p);
    EvalResult b = try_evaluate(ref, p);
    if (!a.ok() || !b.ok()) continue;
    double mag = std::max(a.magnitude, b.magnitude);
    if (mag > opts.max_magnitude) continue;
    diffs.push_back(a.value - b.value);
    if (std::abs(a.value - b.value) > detail::tolerance(a.value, b.value, mag, opts.rel_tol))
      disagree = true;
    if (symbols.empty()) break;
  }
  const bool enough = static_cast<int>(diffs.size()) >= opts.min_points ||
                      (symbols.empty() && !diffs.empty());
  if (!disagree && enough)
    return {Verdict::equivalent_numeric,
            "agrees at " + std::to_string(diffs.size()) + " points"};
  if (disagree && opts.mod_constant && enough) {
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(diffs.size());
    if (var <= opts.constant_variance_tol * std::max(1.0, mean * mean))
      return {Verdict::equivalent_mod_constant,
              "differs by the constant " + std::to_string(mean)};
  }
  if (disagree && !(opts.mod_constant && !enough))
    return {Verdict::not_equivalent, "values disagree"};
  return {Verdict::undecided, "only " + std::to_string(diffs.size()) + " valid points in " +
                                  std::to_string(attempts) + " attempts"};
}

// Token-level entry point; an undecodable prediction is not_equivalent.
inline EquivVerdict check_equiv(const TokenSequence& pred, const TokenSequence& ref,
                                bool mod_constant) {
  Expr r = decode(ref);
  Expr p;
  try {
    p = decode(pred);
  } catch (const MalformedError& err) {
    return {Verdict::not_equivalent, std::string("prediction does not decode: ") + err.what()};
  }
  EquivOptions opts;
  opts.mod_constant = mod_constant;
  return check_equiv(p, r, opts);
}

// Substitutes a candidate y(x) and its derivatives into an ODE expression
// over {x, y, y1, y2} (read as "ode = 0") and checks that the residual
// vanishes. Free constants of the candidate are sampled like x.
inline EquivVerdict check_ode_solution(const Expr& ode, const Expr& candidate,
                                       const EquivOptions& opts = {}) {
  if (contains(candidate, Symbol::y) || contains(candidate, Symbol::y1) ||
      contains(candidate, Symbol::y2))
    return {Verdict::not_equivalent, "candidate refers to y"};
  Expr residual = substitute(ode, Symbol::y, candidate);
  if (contains(ode, Symbol::y1) || contains(ode, Symbol::y2)) {
    Expr d1 = differentiate(candidate, Symbol::x);
    residual = substitute(residual, Symbol::y1, d1);
    if (contains(ode, Symbol::y2))
      residual = substitute(residual, Symbol::y2, differentiate(d1, Symbol::x));
  }
  SimplifyResult s = simplify_ex(residual);
  if (!s.truncated) {
    if (auto r = rational_value(s.expr); r && *r == 0)
      return {Verdict::equivalent_symbolic, "residual simplifies to 0"};
  }

  std::vector<Symbol> symbols = free_symbols(residual);
  Rng rng(opts.seed);
  int valid = 0;
  int attempts = 0;
  while (attempts < opts.max_attempts && valid < opts.min_points) {
    ++attempts;
    Point p = detail::random_point(rng, symbols, opts);
    // The ODE is only meaningful where the candidate itself is defined.
    EvalResult y = try_evaluate(candidate, p);
    if (!y.ok()) continue;
    EvalResult r = try_evaluate(residual, p);
    if (!r.ok() || r.magnitude > opts.max_magnitude) continue;
    ++valid;
    if (std::abs(r.value) > opts.rel_tol * std::max(1.0, r.magnitude))
      return {Verdict::not_equivalent, "residual " + std::to_string(r.value) + " at a sample point"};
    if (symbols.empty()) break;
  }
  if (valid >= opts.min_points || (symbols.empty() && valid > 0))
    return {Verdict::equivalent_numeric, "residual vanishes at " + std::to_string(valid) + " points"};
  return {Verdict::undecided, "only " + std::to_string(valid) + " valid points in " +
                                  std::to_string(attempts) + " attempts"};
}

// ---------------------------------------------------------------------------
// Aggregate scoring.

struct EvalReport {
  std::string task;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::map<Verdict, std::size_t> verdict_counts;

  // Percentage in [0, 100]; 0 for an empty report.
  double accuracy() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }

  void add(const EquivVerdict& v, bool count_mod_constant) {
    ++total;
    ++verdict_counts[v.outcome];
    bool ok = v.outcome == Verdict::equivalent_symbolic ||
              v.outcome == Verdict::equivalent_numeric ||
              (count_mod_constant && v.outcome == Verdict::equivalent_mod_constant);
    if (ok) ++correct;
  }
};

}  // namespace symforge
