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

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "symforge/codec.hpp"
#include "symforge/simplify.hpp"
#include "test_support.hpp"

namespace symforge {
namespace {

const Expr x = var_x();

TokenSequence toks(std::initializer_list<const char*> ts) { return {ts.begin(), ts.end()}; }

TEST(EncodeTest, ReferenceExamples) {
  EXPECT_EQ(encode(x), toks({"x"}));
  EXPECT_EQ(encode(add(num(7), mul(num(3), add(num(5), num(2))))),
            toks({"add", "INT+", "7", "mul", "INT+", "3", "add", "INT+", "5", "INT+", "2"}));
  EXPECT_EQ(encode(num(-42)), toks({"INT-", "4", "2"}));
  EXPECT_EQ(encode(num(0)), toks({"INT+", "0"}));
}

TEST(EncodeTest, TextForm) {
  Expr e = sin(mul(sym(Symbol::pi), x));
  EXPECT_EQ(to_prefix_string(e), "sin mul pi x");
  EXPECT_TRUE(structural_equal(parse_prefix("sin mul pi x"), e));
  EXPECT_EQ(split_tokens("  add  x INT+ 1 "), toks({"add", "x", "INT+", "1"}));
}

TEST(DecodeTest, ReferenceExamples) {
  EXPECT_TRUE(structural_equal(decode(toks({"sin", "x"})), sin(x)));
  try {
    decode(toks({"add", "x"}));
    FAIL() << "expected MalformedError";
  } catch (const MalformedError& err) {
    EXPECT_EQ(err.position(), 2u);
    EXPECT_EQ(err.reason(), "missing operand");
  }
}

struct BadCase {
  TokenSequence tokens;
  std::size_t position;
  std::string reason_prefix;
};

TEST(DecodeTest, ErrorsReportPositionAndReason) {
  std::vector<BadCase> cases = {
      {{}, 0, "empty sequence"},
      {toks({"x", "x"}), 1, "trailing tokens"},
      {toks({"add", "INT+", "x"}), 2, "dangling sign token"},
      {toks({"INT-"}), 1, "dangling sign token"},
      {toks({"INT+", "0", "7"}), 1, "leading zero"},
      {toks({"INT-", "0"}), 1, "negative zero"},
      {toks({"7"}), 0, "digit without sign token"},
      {toks({"sin", "foo"}), 1, "unknown token"},
      {toks({"UNK"}), 0, "unknown token"},
  };
  for (const auto& c : cases) {
    try {
      decode(c.tokens);
      ADD_FAILURE() << "accepted: " << join_tokens(c.tokens);
    } catch (const MalformedError& err) {
      EXPECT_EQ(err.position(), c.position) << join_tokens(c.tokens);
      EXPECT_EQ(err.reason().rfind(c.reason_prefix, 0), 0u) << err.reason();
    }
    EXPECT_FALSE(is_valid_prefix(c.tokens));
    EXPECT_FALSE(try_decode(c.tokens).has_value());
  }
}

TEST(DecodeTest, LargeIntegers) {
  BigInt big("-123456789012345678901234567890");
  Expr e = Expr::integer(big);
  TokenSequence t = encode(e);
  EXPECT_EQ(t.size(), 31u);
  EXPECT_EQ(decode(t).value(), big);
}

TEST(RoundTripTest, SamplerOutput) {
  testing::ExprStream stream(21, 0, 15);
  for (int i = 0; i < 10000; ++i) {
    Expr e = stream.next();
    if (i % 3 == 0) e = simplify(e);  // exercises multi-digit and rational forms
    TokenSequence t = encode(e);
    Expr back = decode(t);
    ASSERT_TRUE(structural_equal(back, e)) << join_tokens(t);
    ASSERT_EQ(parse_prefix(join_tokens(t)), e);
  }
}

// Oracle: the number of tokens follows from node counts and integer widths.
TEST(RoundTripTest, TokenCountMatchesMetrics) {
  testing::ExprStream stream(22, 0, 15);
  for (int i = 0; i < 2000; ++i) {
    Expr e = simplify(stream.next());
    ExprMetrics m = metrics(e);
    std::size_t extra = 0;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
      Expr n = stack.back();
      stack.pop_back();
      if (n.is_integer()) {
        BigInt v = n.value();
        extra += (v < 0 ? BigInt(-v) : v).str().size();  // sign token counted as the leaf
      }
      for (int k = 0; k < n.arity(); ++k) stack.push_back(n.child(k));
    }
    ASSERT_EQ(encode(e).size(), m.internal_nodes + m.leaves + extra);
  }
}

TEST(ValidityTest, AcceptsExactlyTheImageOfEncode) {
  Vocabulary v = Vocabulary::standard();
  std::vector<std::string> alphabet;
  for (std::size_t id = 4; id < v.size(); ++id) alphabet.push_back(v.token(static_cast<int>(id)));
  alphabet.push_back("bogus");
  Rng rng(23);
  testing::ExprStream stream(24, 0, 6);
  int accepted = 0;
  for (int i = 0; i < 50000; ++i) {
    TokenSequence t;
    if (i % 2 == 0) {
      std::size_t len = uniform_int(rng, 0, 9);
      for (std::size_t k = 0; k < len; ++k) t.push_back(alphabet[uniform_below(rng, alphabet.size())]);
    } else {
      // Mutate a valid encoding by one substitution, insertion or deletion.
      t = encode(stream.next());
      std::size_t pos = uniform_below(rng, t.size());
      switch (uniform_below(rng, 4)) {
        case 0: t[pos] = alphabet[uniform_below(rng, alphabet.size())]; break;
        case 1: t.insert(t.begin() + pos, alphabet[uniform_below(rng, alphabet.size())]); break;
        case 2: t.erase(t.begin() + pos); break;
        default: break;
      }
    }
    auto d = try_decode(t);
    bool reproduces = d && encode(*d) == t;
    ASSERT_EQ(is_valid_prefix(t), reproduces) << join_tokens(t);
    accepted += reproduces;
  }
  EXPECT_GT(accepted, 5000);
}

TEST(VocabularyTest, Layout) {
  Vocabulary v = Vocabulary::standard();
  EXPECT_EQ(v.size(), 4u + 15u + 9u + 2u + 10u);
  EXPECT_EQ(v.id("PAD"), 0);
  EXPECT_EQ(v.id("BOS"), 1);
  EXPECT_EQ(v.id("EOS"), 2);
  EXPECT_EQ(v.id("UNK"), 3);
  EXPECT_EQ(v.id("add"), 4);
  EXPECT_EQ(v.id("atan"), 18);
  EXPECT_EQ(v.id("x"), 19);
  EXPECT_EQ(v.id("INT+"), 28);
  EXPECT_EQ(v.id("INT-"), 29);
  EXPECT_EQ(v.id("0"), 30);
  EXPECT_EQ(v.id("9"), 39);
  EXPECT_EQ(v.id("never-seen"), Vocabulary::kUnk);
}

TEST(VocabularyTest, Bijective) {
  Vocabulary v = Vocabulary::standard();
  std::set<std::string> seen;
  for (std::size_t id = 0; id < v.size(); ++id) {
    const std::string& t = v.token(static_cast<int>(id));
    EXPECT_TRUE(seen.insert(t).second) << t;
    EXPECT_EQ(v.id(t), static_cast<int>(id));
  }
}

TEST(VocabularyTest, FileRoundTrip) {
  Vocabulary v = Vocabulary::standard();
  std::stringstream ss;
  v.write(ss);
  std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 16), "PAD\nBOS\nEOS\nUNK\n");
  Vocabulary back = Vocabulary::read(ss);
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t id = 0; id < v.size(); ++id)
    EXPECT_EQ(back.token(static_cast<int>(id)), v.token(static_cast<int>(id)));
  std::stringstream dup("PAD\nBOS\nPAD\n");
  EXPECT_THROW(Vocabulary::read(dup), std::runtime_error);
}

TEST(VocabularyTest, GeneratedDataNeverUsesUnk) {
  Vocabulary v = Vocabulary::standard();
  testing::ExprStream stream(25, 0, 15);
  for (int i = 0; i < 1000; ++i)
    for (int id : v.ids(encode(simplify(stream.next())))) ASSERT_GE(id, 4);
}

}  // namespace
}  // namespace symforge
