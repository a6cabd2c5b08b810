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

// Prefix-order token serialization and the model vocabulary.
//
// Token text forms:
//   operators  add sub mul div pow neg exp ln sqrt sin cos tan asin acos atan
//   leaves     x y y1 y2 pi ee c c1 c2
//   integers   INT+ | INT-  followed by decimal digit tokens 0..9, most
//              significant first, no leading zeros ("INT+ 0" is zero)
// Text form of a sequence: tokens joined by single spaces.

#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "symforge/expr.hpp"

namespace symforge {

using Token = std::string;
using TokenSequence = std::vector<Token>;

inline constexpr std::string_view kIntPos = "INT+";
inline constexpr std::string_view kIntNeg = "INT-";

class MalformedError : public std::runtime_error {
 public:
  MalformedError(std::size_t position, std::string reason)
      : std::runtime_error("malformed sequence at token " + std::to_string(position) + ": " +
                           reason),
        position_(position),
        reason_(std::move(reason)) {}
  // Index of the offending token; equals the sequence length for
  // end-of-sequence errors.
  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

namespace detail {

inline void encode_into(const Expr& e, TokenSequence& out) {
  switch (e.kind()) {
    case NodeKind::integer: {
      const BigInt& v = e.value();
      out.emplace_back(v < 0 ? kIntNeg : kIntPos);
      std::string digits = (v < 0 ? BigInt(-v) : v).str();
      for (char d : digits) out.emplace_back(1, d);
      return;
    }
    case NodeKind::symbol:
      out.emplace_back(symbol_name(e.symbol()));
      return;
    case NodeKind::apply:
      out.emplace_back(op_name(e.op()));
      for (int i = 0; i < e.arity(); ++i) encode_into(e.child(i), out);
      return;
  }
}

inline bool is_digit_token(std::string_view t) {
  return t.size() == 1 && t[0] >= '0' && t[0] <= '9';
}

class Decoder {
 public:
  explicit Decoder(const TokenSequence& t) : toks_(t) {}

  Expr parse() {
    if (toks_.empty()) throw MalformedError(0, "empty sequence");
    Expr e = node();
    if (pos_ != toks_.size()) throw MalformedError(pos_, "trailing tokens");
    return e;
  }

 private:
  Expr node() {
    if (pos_ >= toks_.size()) throw MalformedError(pos_, "missing operand");
    const std::string& t = toks_[pos_];
    if (auto op = op_from_name(t)) {
      ++pos_;
      if (arity(*op) == 1) return Expr::apply(*op, node());
      Expr a = node();
      Expr b = node();
      return Expr::apply(*op, std::move(a), std::move(b));
    }
    if (auto s = symbol_from_name(t)) {
      ++pos_;
      return Expr::symbol(*s);
    }
    if (t == kIntPos || t == kIntNeg) {
      bool negative = t == kIntNeg;
      std::size_t start = ++pos_;
      std::string digits;
      while (pos_ < toks_.size() && is_digit_token(toks_[pos_])) digits += toks_[pos_++][0];
      if (digits.empty()) throw MalformedError(start, "dangling sign token");
      if (digits.size() > 1 && digits[0] == '0')
        throw MalformedError(start, "leading zero in integer");
      if (negative && digits == "0") throw MalformedError(start, "negative zero");
      BigInt v(digits);
      return Expr::integer(negative ? BigInt(-v) : v);
    }
    if (is_digit_token(t)) throw MalformedError(pos_, "digit without sign token");
    throw MalformedError(pos_, "unknown token '" + t + "'");
  }

  const TokenSequence& toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TokenSequence encode(const Expr& e) {
  TokenSequence out;
  out.reserve(e.size() + 4);
  detail::encode_into(e, out);
  return out;
}

// Inverse of encode; throws MalformedError.
inline Expr decode(const TokenSequence& tokens) { return detail::Decoder(tokens).parse(); }

inline std::optional<Expr> try_decode(const TokenSequence& tokens) {
  try {
    return decode(tokens);
  } catch (const MalformedError&) {
    return std::nullopt;
  }
}

// Accepts exactly the sequences in the image of encode.
inline bool is_valid_prefix(const TokenSequence& tokens) {
  return try_decode(tokens).has_value();
}

inline TokenSequence split_tokens(std::string_view text) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline std::string to_prefix_string(const Expr& e) { return join_tokens(encode(e)); }

inline Expr parse_prefix(std::string_view text) { return decode(split_tokens(text)); }

// ---------------------------------------------------------------------------
// Vocabulary.

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  // Reserved tokens, operators in declaration order, leaf symbols, the two
  // sign tokens, then digits 0-9.
  static Vocabulary standard() {
    Vocabulary v;
    for (std::string_view t : {"PAD", "BOS", "EOS", "UNK"}) v.push(std::string(t));
    for (Op op : kAllOps) v.push(std::string(op_name(op)));
    for (Symbol s : kAllSymbols) v.push(std::string(symbol_name(s)));
    v.push(std::string(kIntPos));
    v.push(std::string(kIntNeg));
    for (char d = '0'; d <= '9'; ++d) v.push(std::string(1, d));
    return v;
  }

  static Vocabulary read(std::istream& in) {
    Vocabulary v;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) throw std::runtime_error("vocabulary: empty line " +
                                                 std::to_string(v.size()));
      if (v.ids_.count(line)) throw std::runtime_error("vocabulary: duplicate token '" + line + "'");
      v.push(line);
    }
    return v;
  }

  void write(std::ostream& out) const {
    for (const auto& t : tokens_) out << t << '\n';
  }

  std::size_t size() const { return tokens_.size(); }
  int id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnk : it->second;
  }
  bool contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  std::vector<int> ids(const TokenSequence& seq) const {
    std::vector<int> out;
    out.reserve(seq.size());
    for (const auto& t : seq) out.push_back(id(t));
    return out;
  }

 private:
  void push(std::string t) {
    ids_.emplace(t, static_cast<int>(tokens_.size()));
    tokens_.push_back(std::move(t));
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace symforge
