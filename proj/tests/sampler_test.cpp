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

#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <set>

#include "symforge/sampler.hpp"

namespace symforge {
namespace {

// Enumerates every unary-binary shape with n internal nodes, in prefix form.
std::vector<std::string> enumerate_shapes(int n) {
  if (n == 0) return {"0"};
  std::vector<std::string> out;
  for (const auto& child : enumerate_shapes(n - 1)) out.push_back("1" + child);
  for (int left = 0; left <= n - 1; ++left)
    for (const auto& l : enumerate_shapes(left))
      for (const auto& r : enumerate_shapes(n - 1 - left)) out.push_back("2" + l + r);
  return out;
}

TEST(ShapeCountTest, ReferenceValues) {
  EXPECT_EQ(count_shapes(0), 1);
  EXPECT_EQ(count_shapes(1), 2);
  EXPECT_EQ(count_shapes(2), 6);
}

TEST(ShapeCountTest, MatchesEnumeration) {
  for (int n = 0; n <= 8; ++n) {
    auto shapes = enumerate_shapes(n);
    std::set<std::string> distinct(shapes.begin(), shapes.end());
    EXPECT_EQ(distinct.size(), shapes.size());
    EXPECT_EQ(count_shapes(n), BigInt(shapes.size())) << "n=" << n;
  }
}

TEST(ShapeCountTest, Recurrence) {
  ShapeCountTable t(6);
  EXPECT_EQ(t.count(0, 2), 0);
  EXPECT_EQ(t.count(1, 1), 2);
  EXPECT_EQ(t.count(2, 1), 4);
  EXPECT_EQ(t.count(1, 2), t.count(0, 2) + t.count(1, 1) + t.count(2, 1));
  for (int e = 0; e < 8; ++e) EXPECT_EQ(t.count(e, 0), 1);
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(t.count(0, n), 0);
    for (int e = 1; e + n + 1 < 2 * 6 + 3; ++e)
      EXPECT_EQ(t.count(e, n), t.count(e - 1, n) + t.count(e, n - 1) + t.count(e + 1, n - 1));
  }
  EXPECT_THROW(t.count(1, 7), std::out_of_range);
}

TEST(ShapeCountTest, LargeCountsAreExact) {
  // Large Schroeder numbers.
  EXPECT_EQ(count_shapes(3), 22);
  EXPECT_EQ(count_shapes(4), 90);
  EXPECT_EQ(count_shapes(10), BigInt(1037718));
  EXPECT_GT(count_shapes(60), BigInt("1000000000000000000000000000000"));
}

TEST(SampleShapeTest, ExactSize) {
  Rng rng(1);
  for (int n = 0; n <= 30; ++n)
    for (int i = 0; i < 20; ++i) {
      Shape s = sample_shape(n, rng);
      EXPECT_EQ(s.internal_nodes(), static_cast<std::size_t>(n));
      // Valid prefix arity sequence.
      long need = 1;
      for (auto a : s.arities) {
        ASSERT_GT(need, 0);
        need += static_cast<long>(a) - 1;
      }
      EXPECT_EQ(need, 0);
    }
  EXPECT_EQ(sample_shape(0, rng).key(), "0");
}

double chi_square_p(int n, int draws, std::uint64_t seed) {
  auto shapes = enumerate_shapes(n);
  std::map<std::string, int> counts;
  for (const auto& s : shapes) counts[s] = 0;
  Rng rng(seed);
  for (int i = 0; i < draws; ++i) {
    auto it = counts.find(sample_shape(n, rng).key());
    if (it == counts.end()) return -1.0;
    ++it->second;
  }
  double expected = static_cast<double>(draws) / static_cast<double>(shapes.size());
  double stat = 0.0;
  for (const auto& [key, c] : counts) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(shapes.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(SampleShapeTest, UniformAtTwoOver60kDraws) { EXPECT_GT(chi_square_p(2, 60000, 2), 0.001); }

TEST(SampleShapeTest, UniformOver100kDraws) {
  for (int n = 1; n <= 3; ++n) EXPECT_GT(chi_square_p(n, 100000, 10 + n), 0.001) << "n=" << n;
}

TEST(SampleShapeTest, UniformAtFive) { EXPECT_GT(chi_square_p(5, 100000, 3), 0.001); }

// Decorates a shape given by its arity key.
Expr decorate_one(const std::string& key, const GenProfile& p, std::uint64_t seed) {
  Shape s;
  for (char c : key) s.arities.push_back(static_cast<std::uint8_t>(c - '0'));
  Rng rng(seed);
  return decorate(s, p, rng);
}

TEST(DecorateTest, ForcedOperator) {
  GenProfile p;
  p.weight(Op::add) = 1.0;
  p.leaf_weights = {1.0, 0.0, 0.0};
  Expr e = decorate_one("200", p, 4);
  EXPECT_TRUE(structural_equal(e, add(var_x(), var_x())));
}

TEST(DecorateTest, ZeroWeightArityIsAnError) {
  GenProfile p;
  p.weight(Op::add) = 1.0;
  EXPECT_THROW(decorate_one("10", p, 5), ProfileError);
  GenProfile q;
  q.weight(Op::sin) = 1.0;
  EXPECT_THROW(decorate_one("200", q, 5), ProfileError);
  GenProfile r = GenProfile::preset("uniform");
  r.leaf_weights = {0.0, 0.0, 0.0};
  EXPECT_THROW(decorate_one("0", r, 5), ProfileError);
  EXPECT_THROW(GenProfile::preset("nonsense"), ProfileError);
}

TEST(DecorateTest, IntegersInRange) {
  GenProfile p = GenProfile::preset("uniform");
  p.leaf_weights = {0.0, 1.0, 0.0};
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Expr e = decorate_one("0", p, seed);
    ASSERT_TRUE(e.is_integer());
    ASSERT_NE(e.value(), 0);
    ASSERT_GE(e.value(), -5);
    ASSERT_LE(e.value(), 5);
  }
}

std::map<Op, int> op_histogram(const Expr& e) {
  std::map<Op, int> h;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr n = stack.back();
    stack.pop_back();
    if (n.kind() == NodeKind::apply) ++h[n.op()];
    for (int k = 0; k < n.arity(); ++k) stack.push_back(n.child(k));
  }
  return h;
}

TEST(PresetTest, UniformHasBothArities) {
  GenProfile p = GenProfile::preset("uniform");
  EXPECT_GT(p.weight(Op::add), 0);
  EXPECT_GT(p.weight(Op::sin), 0);
}

TEST(PresetTest, PolyDominantFrequency) {
  Sampler s(GenProfile::preset("poly_dominant"), 6);
  long total = 0;
  long transcendental = 0;
  for (int i = 0; i < 1000; ++i)
    for (auto [op, c] : op_histogram(s.sample())) {
      total += c;
      if (op != Op::neg && arity(op) == 1) transcendental += c;
    }
  EXPECT_LE(static_cast<double>(transcendental), 0.05 * static_cast<double>(total));
}

double unary_share(const GenProfile& p, std::initializer_list<Op> family) {
  double fam = 0.0;
  double all = 0.0;
  for (Op op : kAllOps)
    if (arity(op) == 1) all += p.weight(op);
  for (Op op : family) fam += p.weight(op);
  return fam / all;
}

TEST(PresetTest, DominantShares) {
  EXPECT_GE(unary_share(GenProfile::preset("trig_dominant"),
                        {Op::sin, Op::cos, Op::tan, Op::asin, Op::acos, Op::atan}),
            0.8);
  EXPECT_GE(unary_share(GenProfile::preset("log_dominant"), {Op::exp, Op::ln}), 0.8);
  EXPECT_LE(unary_share(GenProfile::preset("poly_dominant"),
                        {Op::exp, Op::ln, Op::sqrt, Op::sin, Op::cos, Op::tan, Op::asin,
                         Op::acos, Op::atan}),
            kResidualShare + 1e-12);
}

TEST(SamplerTest, NeverEmitsZeroWeightOperators) {
  GenProfile p = GenProfile::preset("uniform");
  p.weight(Op::tan) = 0.0;
  p.weight(Op::div) = 0.0;
  Sampler s(p, 7);
  for (int i = 0; i < 2000; ++i) {
    auto h = op_histogram(s.sample());
    ASSERT_EQ(h.count(Op::tan), 0u);
    ASSERT_EQ(h.count(Op::div), 0u);
  }
}

TEST(SamplerTest, Deterministic) {
  for (const char* name : {"uniform", "trig_dominant"}) {
    Sampler a(GenProfile::preset(name), 42);
    Sampler b(GenProfile::preset(name), 42);
    for (int i = 0; i < 500; ++i) ASSERT_TRUE(structural_equal(a.sample(), b.sample()));
  }
  Sampler c(GenProfile::preset("uniform"), 43);
  Sampler d(GenProfile::preset("uniform"), 44);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += structural_equal(c.sample(), d.sample());
  EXPECT_LT(same, 50);
}

TEST(SamplerTest, SizeRange) {
  Sampler s(GenProfile::preset("uniform"), 8);
  std::set<std::size_t> seen;
  for (int i = 0; i < 3000; ++i) {
    std::size_t n = metrics(s.sample()).internal_nodes;
    ASSERT_GE(n, 3u);
    ASSERT_LE(n, 15u);
    seen.insert(n);
  }
  EXPECT_EQ(seen.size(), 13u);
  GenProfile bad = GenProfile::preset("uniform");
  bad.min_ops = 5;
  bad.max_ops = 2;
  EXPECT_THROW(Sampler(bad, 1), ProfileError);
}

}  // namespace
}  // namespace symforge
