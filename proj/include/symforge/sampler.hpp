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

// Uniform random unary-binary trees and their decoration into expressions.
//
// Shapes are drawn uniformly among all trees with a given number of internal
// nodes using the table D(e, n): the number of ways to complete e pending
// slots with n more internal nodes,
//   D(e, 0) = 1,  D(0, n) = 0,  D(e, n) = D(e-1, n) + D(e, n-1) + D(e+1, n-1).
// Slots are filled in prefix order; at each step a position k among the e
// pending slots and an arity a are drawn with odds D(e-k, n-1) (a = 1) and
// D(e-k+1, n-1) (a = 2), and the k slots before it become leaves.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symforge/expr.hpp"
#include "symforge/random.hpp"

namespace symforge {

class ShapeCountTable {
 public:
  explicit ShapeCountTable(int max_ops) : max_ops_(max_ops), width_(2 * max_ops + 3) {
    if (max_ops < 0) throw std::invalid_argument("ShapeCountTable: negative size");
    table_.assign(static_cast<std::size_t>(max_ops + 1) * width_, BigInt(0));
    for (int e = 0; e < width_; ++e) at(e, 0) = 1;
    for (int n = 1; n <= max_ops; ++n) {
      at(0, n) = 0;
      for (int e = 1; e + 1 < width_; ++e) at(e, n) = at(e - 1, n) + at(e, n - 1) + at(e + 1, n - 1);
    }
  }

  // Shared table large enough for max_ops; grows by replacement, never mutates.
  static std::shared_ptr<const ShapeCountTable> shared(int max_ops) {
    static std::mutex mu;
    static std::shared_ptr<const ShapeCountTable> cached;
    std::lock_guard lock(mu);
    if (!cached || cached->max_ops() < max_ops)
      cached = std::make_shared<const ShapeCountTable>(std::max(max_ops, 64));
    return cached;
  }

  int max_ops() const { return max_ops_; }

  const BigInt& count(int empty_slots, int ops) const {
    if (ops < 0 || ops > max_ops_ || empty_slots < 0 || empty_slots >= width_ - ops)
      throw std::out_of_range("ShapeCountTable: (" + std::to_string(empty_slots) + ", " +
                              std::to_string(ops) + ") outside table");
    return table_[index(empty_slots, ops)];
  }

 private:
  std::size_t index(int e, int n) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(e);
  }
  BigInt& at(int e, int n) { return table_[index(e, n)]; }

  int max_ops_;
  int width_;
  std::vector<BigInt> table_;
};

// Number of distinct unary-binary tree shapes with n internal nodes.
inline BigInt count_shapes(int n) { return ShapeCountTable::shared(n)->count(1, n); }

// An unlabeled tree: node arities (0, 1 or 2) in prefix order.
struct Shape {
  std::vector<std::uint8_t> arities;

  std::size_t internal_nodes() const {
    std::size_t n = 0;
    for (auto a : arities) n += a > 0;
    return n;
  }
  std::string key() const {
    std::string s;
    for (auto a : arities) s += static_cast<char>('0' + a);
    return s;
  }
};

inline Shape sample_shape(int n, Rng& rng, const ShapeCountTable& table) {
  Shape shape;
  int empty = 1;
  for (int left = n; left > 0; --left) {
    BigInt r = uniform_below(rng, table.count(empty, left));
    int chosen_k = -1;
    int chosen_arity = 0;
    for (int k = 0; k < empty && chosen_k < 0; ++k) {
      for (int a = 1; a <= 2; ++a) {
        const BigInt& w = table.count(empty - k + a - 1, left - 1);
        if (r < w) {
          chosen_k = k;
          chosen_arity = a;
          break;
        }
        r -= w;
      }
    }
    if (chosen_k < 0) throw std::logic_error("sample_shape: inconsistent count table");
    shape.arities.insert(shape.arities.end(), static_cast<std::size_t>(chosen_k), 0);
    shape.arities.push_back(static_cast<std::uint8_t>(chosen_arity));
    empty += chosen_arity - 1 - chosen_k;
  }
  shape.arities.insert(shape.arities.end(), static_cast<std::size_t>(empty), 0);
  return shape;
}

inline Shape sample_shape(int n, Rng& rng) {
  return sample_shape(n, rng, *ShapeCountTable::shared(n));
}

// ---------------------------------------------------------------------------
// Generation profiles.

enum class LeafKind : std::uint8_t { variable, integer, constant };

struct GenProfile {
  std::string name = "uniform";
  int min_ops = 3;
  int max_ops = 15;
  std::array<double, kAllOps.size()> op_weights{};
  // Indexed by LeafKind.
  std::array<double, 3> leaf_weights{0.55, 0.40, 0.05};
  int int_min = -5;
  int int_max = 5;
  bool exclude_zero = true;
  std::uint64_t seed = 0;

  double& weight(Op op) { return op_weights[static_cast<std::size_t>(op)]; }
  double weight(Op op) const { return op_weights[static_cast<std::size_t>(op)]; }

  static GenProfile preset(std::string_view name);
};

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Residual share of unary weight left to operators outside a dominant family.
inline constexpr double kResidualShare = 0.05;

namespace detail {

inline void spread(GenProfile& p, std::initializer_list<Op> ops, double total) {
  for (Op op : ops) p.weight(op) = total / static_cast<double>(ops.size());
}

}  // namespace detail

// Presets: uniform, poly_dominant, trig_dominant, log_dominant. The short
// forms poly, trig and log are accepted as aliases.
inline GenProfile GenProfile::preset(std::string_view name) {
  GenProfile p;
  for (Op op : {Op::add, Op::sub, Op::mul, Op::div, Op::pow}) p.weight(op) = 1.0;
  if (name == "uniform") {
    for (Op op : kAllOps) p.weight(op) = 1.0;
    p.name = "uniform";
    return p;
  }
  const double eps = kResidualShare;
  if (name == "poly_dominant" || name == "poly") {
    p.name = "poly_dominant";
    p.weight(Op::neg) = 1.0 - eps;
    detail::spread(p, {Op::exp, Op::ln, Op::sqrt, Op::sin, Op::cos, Op::tan, Op::asin, Op::acos,
                       Op::atan},
                   eps);
    return p;
  }
  if (name == "trig_dominant" || name == "trig") {
    p.name = "trig_dominant";
    detail::spread(p, {Op::sin, Op::cos, Op::tan}, 0.6);
    detail::spread(p, {Op::asin, Op::acos, Op::atan}, 0.3);
    p.weight(Op::neg) = eps;
    detail::spread(p, {Op::exp, Op::ln, Op::sqrt}, eps);
    return p;
  }
  if (name == "log_dominant" || name == "log") {
    p.name = "log_dominant";
    detail::spread(p, {Op::exp, Op::ln}, 0.9);
    p.weight(Op::neg) = eps;
    detail::spread(p, {Op::sqrt, Op::sin, Op::cos, Op::tan, Op::asin, Op::acos, Op::atan}, eps);
    return p;
  }
  throw ProfileError("unknown profile preset '" + std::string(name) + "'");
}

// Labels a shape: operators by arity-restricted weights, leaves by kind.
inline Expr decorate(const Shape& shape, const GenProfile& profile, Rng& rng) {
  std::array<double, kAllOps.size()> unary{};
  std::array<double, kAllOps.size()> binary{};
  double unary_total = 0.0;
  double binary_total = 0.0;
  for (std::size_t i = 0; i < kAllOps.size(); ++i) {
    double w = profile.op_weights[i];
    if (w < 0.0) throw ProfileError("negative operator weight");
    (arity(kAllOps[i]) == 1 ? unary : binary)[i] = w;
    (arity(kAllOps[i]) == 1 ? unary_total : binary_total) += w;
  }
  double leaf_total = 0.0;
  for (double w : profile.leaf_weights) {
    if (w < 0.0) throw ProfileError("negative leaf weight");
    leaf_total += w;
  }
  if (profile.exclude_zero && profile.int_min == 0 && profile.int_max == 0 &&
      profile.leaf_weights[static_cast<std::size_t>(LeafKind::integer)] > 0.0)
    throw ProfileError("integer range is empty");
  if (profile.int_min > profile.int_max) throw ProfileError("integer range is empty");

  std::size_t pos = 0;
  auto leaf = [&]() -> Expr {
    if (leaf_total <= 0.0) throw ProfileError("all leaf weights are zero");
    switch (static_cast<LeafKind>(weighted_index(rng, profile.leaf_weights))) {
      case LeafKind::variable:
        return var_x();
      case LeafKind::integer: {
        for (;;) {
          auto v = uniform_int(rng, profile.int_min, profile.int_max);
          if (v != 0 || !profile.exclude_zero) return num(v);
        }
      }
      case LeafKind::constant:
        return sym(uniform_below(rng, 2) == 0 ? Symbol::pi : Symbol::ee);
    }
    return var_x();
  };
  auto build = [&](auto&& self) -> Expr {
    if (pos >= shape.arities.size()) throw std::invalid_argument("decorate: truncated shape");
    int a = shape.arities[pos++];
    if (a == 0) return leaf();
    if (a == 1) {
      if (unary_total <= 0.0) throw ProfileError("all unary operator weights are zero");
      Op op = kAllOps[weighted_index(rng, unary)];
      return Expr::apply(op, self(self));
    }
    if (binary_total <= 0.0) throw ProfileError("all binary operator weights are zero");
    Op op = kAllOps[weighted_index(rng, binary)];
    Expr lhs = self(self);
    Expr rhs = self(self);
    return Expr::apply(op, std::move(lhs), std::move(rhs));
  };
  Expr out = build(build);
  if (pos != shape.arities.size()) throw std::invalid_argument("decorate: trailing shape nodes");
  return out;
}

// Owns its engine; one instance per worker.
class Sampler {
 public:
  Sampler(GenProfile profile, std::uint64_t seed)
      : profile_(std::move(profile)),
        rng_(seed),
        table_(ShapeCountTable::shared(std::max(profile_.max_ops, 0))) {
    if (profile_.min_ops < 0 || profile_.min_ops > profile_.max_ops)
      throw ProfileError("invalid operator-count range");
  }

  const GenProfile& profile() const { return profile_; }
  Rng& rng() { return rng_; }

  Shape shape(int n) { return sample_shape(n, rng_, *table_); }
  Expr decorate(const Shape& s) { return symforge::decorate(s, profile_, rng_); }

  // A decorated tree whose internal-node count is uniform in [lo, hi].
  Expr sample(int lo, int hi) {
    int n = static_cast<int>(uniform_int(rng_, lo, hi));
    return decorate(shape(n));
  }
  Expr sample() { return sample(profile_.min_ops, profile_.max_ops); }

 private:
  GenProfile profile_;
  Rng rng_;
  std::shared_ptr<const ShapeCountTable> table_;
};

}  // namespace symforge
