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

// Immutable unary-binary expression trees.
//
// An Expr is a cheap handle (shared pointer) to an immutable node. Nodes cache
// their size and structural hash so equality and ordering short-circuit.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace symforge {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Op : std::uint8_t {
  // binary
  add, sub, mul, div, pow,
  // unary
  neg, exp, ln, sqrt, sin, cos, tan, asin, acos, atan,
};

inline constexpr std::array<Op, 15> kAllOps = {
    Op::add, Op::sub, Op::mul,  Op::div, Op::pow,  Op::neg,  Op::exp, Op::ln,
    Op::sqrt, Op::sin, Op::cos, Op::tan, Op::asin, Op::acos, Op::atan};

inline constexpr int arity(Op op) { return static_cast<int>(op) < 5 ? 2 : 1; }

inline constexpr std::string_view op_name(Op op) {
  constexpr std::array<std::string_view, 15> names = {
      "add", "sub", "mul", "div", "pow", "neg",  "exp", "ln",
      "sqrt", "sin", "cos", "tan", "asin", "acos", "atan"};
  return names[static_cast<std::size_t>(op)];
}

inline std::optional<Op> op_from_name(std::string_view name) {
  for (Op op : kAllOps)
    if (op_name(op) == name) return op;
  return std::nullopt;
}

// Leaf symbols. pi and ee are numeric constants; the others are bindable.
enum class Symbol : std::uint8_t { x, y, y1, y2, pi, ee, c, c1, c2 };

inline constexpr std::array<Symbol, 9> kAllSymbols = {
    Symbol::x,  Symbol::y,  Symbol::y1, Symbol::y2, Symbol::pi,
    Symbol::ee, Symbol::c,  Symbol::c1, Symbol::c2};

inline constexpr std::string_view symbol_name(Symbol s) {
  constexpr std::array<std::string_view, 9> names = {"x",  "y", "y1", "y2", "pi",
                                                     "ee", "c", "c1", "c2"};
  return names[static_cast<std::size_t>(s)];
}

inline std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (Symbol s : kAllSymbols)
    if (symbol_name(s) == name) return s;
  return std::nullopt;
}

inline constexpr bool is_numeric_constant(Symbol s) {
  return s == Symbol::pi || s == Symbol::ee;
}

enum class NodeKind : std::uint8_t { integer, symbol, apply };

class Expr {
 public:
  // A default-constructed Expr is the integer 0.
  Expr();

  static Expr integer(BigInt value);
  static Expr integer(long long value) { return integer(BigInt(value)); }
  static Expr symbol(Symbol s);
  static Expr apply(Op op, Expr arg);
  static Expr apply(Op op, Expr lhs, Expr rhs);

  NodeKind kind() const;
  bool is_integer() const { return kind() == NodeKind::integer; }
  bool is_symbol() const { return kind() == NodeKind::symbol; }
  bool is_apply() const { return kind() == NodeKind::apply; }
  bool is_leaf() const { return kind() != NodeKind::apply; }
  bool is_op(Op op) const { return is_apply() && this->op() == op; }
  bool is_symbol(Symbol s) const { return is_symbol() && symbol() == s; }
  bool is_integer(long long v) const { return is_integer() && value() == v; }

  const BigInt& value() const;
  Symbol symbol() const;
  Op op() const;
  int arity() const;
  const Expr& child(int i) const;
  const Expr& lhs() const { return child(0); }
  const Expr& rhs() const { return child(1); }

  // Total node count (operators and leaves).
  std::size_t size() const;
  std::size_t hash() const;

  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  explicit Expr(std::nullptr_t) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  NodeKind kind = NodeKind::integer;
  Op op = Op::add;
  Symbol sym = Symbol::x;
  BigInt value;
  std::array<Expr, 2> children{Expr(nullptr), Expr(nullptr)};
  std::size_t size = 1;
  std::size_t hash = 0;
};

namespace detail {

inline std::size_t mix_hash(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t bigint_hash(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() &&
      v <= std::numeric_limits<long long>::max())
    return std::hash<long long>{}(v.convert_to<long long>());
  return std::hash<std::string>{}(v.str());
}


}  // namespace detail

inline Expr Expr::integer(BigInt value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::integer;
  n->hash = detail::mix_hash(0x11, detail::bigint_hash(value));
  n->value = std::move(value);
  return Expr(std::move(n));
}

inline Expr::Expr() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::integer;
    n->hash = detail::mix_hash(0x11, std::hash<long long>{}(0));
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = zero;
}

inline Expr Expr::symbol(Symbol s) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::symbol;
  n->sym = s;
  n->hash = detail::mix_hash(0x22, static_cast<std::size_t>(s));
  return Expr(std::move(n));
}

inline Expr Expr::apply(Op op, Expr arg) {
  if (symforge::arity(op) != 1)
    throw std::invalid_argument("operator '" + std::string(op_name(op)) +
                                "' is binary");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::apply;
  n->op = op;
  n->size = 1 + arg.size();
  n->hash = detail::mix_hash(detail::mix_hash(0x33, static_cast<std::size_t>(op)),
                             arg.hash());
  n->children[0] = std::move(arg);
  return Expr(std::move(n));
}

inline Expr Expr::apply(Op op, Expr lhs, Expr rhs) {
  if (symforge::arity(op) != 2)
    throw std::invalid_argument("operator '" + std::string(op_name(op)) +
                                "' is unary");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::apply;
  n->op = op;
  n->size = 1 + lhs.size() + rhs.size();
  n->hash = detail::mix_hash(
      detail::mix_hash(detail::mix_hash(0x33, static_cast<std::size_t>(op)),
                       lhs.hash()),
      rhs.hash());
  n->children[0] = std::move(lhs);
  n->children[1] = std::move(rhs);
  return Expr(std::move(n));
}

inline NodeKind Expr::kind() const { return node_->kind; }

inline const BigInt& Expr::value() const {
  if (!is_integer()) throw std::logic_error("Expr::value on non-integer node");
  return node_->value;
}

inline Symbol Expr::symbol() const {
  if (!is_symbol()) throw std::logic_error("Expr::symbol on non-symbol node");
  return node_->sym;
}

inline Op Expr::op() const {
  if (!is_apply()) throw std::logic_error("Expr::op on leaf node");
  return node_->op;
}

inline int Expr::arity() const { return is_apply() ? symforge::arity(node_->op) : 0; }

inline const Expr& Expr::child(int i) const {
  if (i < 0 || i >= arity()) throw std::out_of_range("Expr::child index");
  return node_->children[static_cast<std::size_t>(i)];
}

inline std::size_t Expr::size() const { return node_->size; }
inline std::size_t Expr::hash() const { return node_->hash; }

// Node-for-node identity.
inline bool structural_equal(const Expr& a, const Expr& b) {
  if (a.identity() == b.identity()) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind())
    return false;
  switch (a.kind()) {
    case NodeKind::integer:
      return a.value() == b.value();
    case NodeKind::symbol:
      return a.symbol() == b.symbol();
    case NodeKind::apply:
      if (a.op() != b.op()) return false;
      for (int i = 0; i < a.arity(); ++i)
        if (!structural_equal(a.child(i), b.child(i))) return false;
      return true;
  }
  return false;
}

inline bool operator==(const Expr& a, const Expr& b) { return structural_equal(a, b); }

// Total order used for canonical operand ordering: smaller trees first, then
// leaves before applications, then by payload and children.
inline std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.identity() == b.identity()) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case NodeKind::integer:
      if (a.value() < b.value()) return std::strong_ordering::less;
      if (b.value() < a.value()) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case NodeKind::symbol:
      return a.symbol() <=> b.symbol();
    case NodeKind::apply:
      if (auto c = a.op() <=> b.op(); c != 0) return c;
      for (int i = 0; i < a.arity(); ++i)
        if (auto c = compare(a.child(i), b.child(i)); c != 0) return c;
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Builders.

inline Expr num(long long v) { return Expr::integer(v); }
inline Expr num(BigInt v) { return Expr::integer(std::move(v)); }
inline Expr sym(Symbol s) { return Expr::symbol(s); }
inline Expr var_x() { return Expr::symbol(Symbol::x); }

inline Expr add(Expr a, Expr b) { return Expr::apply(Op::add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return Expr::apply(Op::sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return Expr::apply(Op::mul, std::move(a), std::move(b)); }
inline Expr div(Expr a, Expr b) { return Expr::apply(Op::div, std::move(a), std::move(b)); }
inline Expr pow(Expr a, Expr b) { return Expr::apply(Op::pow, std::move(a), std::move(b)); }
inline Expr neg(Expr a) { return Expr::apply(Op::neg, std::move(a)); }
inline Expr exp(Expr a) { return Expr::apply(Op::exp, std::move(a)); }
inline Expr ln(Expr a) { return Expr::apply(Op::ln, std::move(a)); }
inline Expr sqrt(Expr a) { return Expr::apply(Op::sqrt, std::move(a)); }
inline Expr sin(Expr a) { return Expr::apply(Op::sin, std::move(a)); }
inline Expr cos(Expr a) { return Expr::apply(Op::cos, std::move(a)); }
inline Expr tan(Expr a) { return Expr::apply(Op::tan, std::move(a)); }
inline Expr asin(Expr a) { return Expr::apply(Op::asin, std::move(a)); }
inline Expr acos(Expr a) { return Expr::apply(Op::acos, std::move(a)); }
inline Expr atan(Expr a) { return Expr::apply(Op::atan, std::move(a)); }

// ---------------------------------------------------------------------------
// Structural utilities.

struct ExprMetrics {
  std::size_t internal_nodes = 0;
  std::size_t depth = 0;
  std::size_t leaves = 0;
  friend bool operator==(const ExprMetrics&, const ExprMetrics&) = default;
};

inline ExprMetrics metrics(const Expr& e) {
  if (e.is_leaf()) return {0, 0, 1};
  ExprMetrics m{1, 0, 0};
  for (int i = 0; i < e.arity(); ++i) {
    ExprMetrics c = metrics(e.child(i));
    m.internal_nodes += c.internal_nodes;
    m.leaves += c.leaves;
    m.depth = std::max(m.depth, c.depth + 1);
  }
  return m;
}

inline std::size_t count_symbol(const Expr& e, Symbol s) {
  if (e.is_symbol()) return e.symbol() == s ? 1 : 0;
  std::size_t n = 0;
  for (int i = 0; i < e.arity(); ++i) n += count_symbol(e.child(i), s);
  return n;
}

inline bool contains(const Expr& e, Symbol s) {
  if (e.is_symbol()) return e.symbol() == s;
  for (int i = 0; i < e.arity(); ++i)
    if (contains(e.child(i), s)) return true;
  return false;
}

// Bindable symbols (everything except pi and ee) occurring in e, in enum order.
inline std::vector<Symbol> free_symbols(const Expr& e) {
  std::vector<Symbol> out;
  for (Symbol s : kAllSymbols)
    if (!is_numeric_constant(s) && contains(e, s)) out.push_back(s);
  return out;
}

inline Expr substitute(const Expr& e, Symbol s, const Expr& replacement) {
  if (e.is_symbol()) return e.symbol() == s ? replacement : e;
  if (e.is_integer()) return e;
  if (e.arity() == 1) {
    Expr a = substitute(e.child(0), s, replacement);
    if (a.identity() == e.child(0).identity()) return e;
    return Expr::apply(e.op(), std::move(a));
  }
  Expr a = substitute(e.child(0), s, replacement);
  Expr b = substitute(e.child(1), s, replacement);
  if (a.identity() == e.child(0).identity() && b.identity() == e.child(1).identity())
    return e;
  return Expr::apply(e.op(), std::move(a), std::move(b));
}

// Debug renderer; fully parenthesized infix.
inline std::string to_infix(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::integer:
      return e.value().str();
    case NodeKind::symbol:
      return std::string(symbol_name(e.symbol()));
    case NodeKind::apply:
      break;
  }
  if (e.arity() == 1) {
    if (e.op() == Op::neg) return "-(" + to_infix(e.child(0)) + ")";
    return std::string(op_name(e.op())) + "(" + to_infix(e.child(0)) + ")";
  }
  static constexpr std::array<std::string_view, 5> infix = {" + ", " - ", " * ", " / ",
                                                            "^"};
  return "(" + to_infix(e.child(0)) + std::string(infix[static_cast<std::size_t>(e.op())]) +
         to_infix(e.child(1)) + ")";
}

}  // namespace symforge
