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

#include <unordered_set>

#include "symforge/taskgen.hpp"

namespace symforge {
namespace {

const Expr x = var_x();
const Expr y = sym(Symbol::y);
const Expr y1 = sym(Symbol::y1);
const Expr c = sym(Symbol::c);
const Expr c1 = sym(Symbol::c1);
const Expr c2 = sym(Symbol::c2);

void expect_same(const Expr& got, const Expr& want) {
  EXPECT_TRUE(structural_equal(got, want)) << to_infix(got) << " vs " << to_infix(want);
}

TEST(TaskNamesTest, RoundTrip) {
  for (Task t : kAllTasks) EXPECT_EQ(task_from_name(task_name(t)), t);
  EXPECT_FALSE(task_from_name("ode3"));
}

TEST(BwdTest, ReferenceExamples) {
  Candidate a = make_bwd(asin(x));
  ASSERT_TRUE(a.ok()) << a.reject;
  expect_same(*a.problem, div(num(1), sqrt(sub(num(1), pow(x, num(2))))));
  expect_same(*a.solution, asin(x));

  Candidate b = make_bwd(x);
  EXPECT_FALSE(b.ok());
  EXPECT_STREQ(b.reject, "constant derivative");
  EXPECT_FALSE(make_bwd(add(num(2), num(3))).ok());
}

TEST(BwdTest, TokenCaps) {
  GenConfig cfg;
  cfg.max_problem_tokens = 3;
  Candidate r = make_bwd(mul(x, sin(x)), cfg);
  EXPECT_FALSE(r.ok());
  EXPECT_STREQ(r.reject, "problem too long");
}

TEST(FwdTest, ReferenceExamples) {
  Candidate a = make_fwd(cos(x));
  ASSERT_TRUE(a.ok());
  expect_same(*a.solution, sin(x));
  Candidate b = make_fwd(exp(pow(x, num(2))));
  EXPECT_FALSE(b.ok());
  EXPECT_STREQ(b.reject, "no rule");
}

TEST(IbpTest, ReferenceExample) {
  PrimitiveTable table;
  table.insert(sin(x), neg(cos(x)));
  Candidate r = make_ibp(x, sin(x), table);
  ASSERT_TRUE(r.ok()) << r.reject;
  expect_same(*r.problem, mul(x, cos(x)));
  expect_same(*r.solution, add(cos(x), mul(x, sin(x))));
  EXPECT_TRUE(verify_pair(Task::ibp, *r.problem, *r.solution).equivalent());
}

TEST(IbpTest, TableUsesPrimitiveParts) {
  PrimitiveTable table;
  table.insert(mul(num(2), x), pow(x, num(2)));
  auto hit = table.lookup(mul(num(-3), x));
  ASSERT_TRUE(hit);
  EXPECT_TRUE(check_equiv(*hit, mul(div(num(-3), num(2)), pow(x, num(2)))).equivalent());
  EXPECT_FALSE(table.lookup(sin(x)));
  EXPECT_EQ(table.size(), 1u);
}

TEST(IbpTest, EmptyTableHasZeroYield) {
  PrimitiveTable table;
  GenConfig cfg;
  cfg.task = Task::ibp;
  cfg.count = 10;
  EXPECT_THROW(generate_ibp(cfg, table), GenerationExhausted);
  try {
    generate_ibp(cfg, table);
  } catch (const GenerationExhausted& e) {
    EXPECT_NE(std::string(e.what()).find("zero yield"), std::string::npos);
    EXPECT_EQ(e.accepted(), 0u);
  }
  EXPECT_FALSE(make_ibp(x, sin(x), table).ok());
}

TEST(Ode1Test, ReferenceExample) {
  Candidate r = make_ode1(mul(c, x));
  ASSERT_TRUE(r.ok()) << r.reject;
  expect_same(*r.problem, sub(mul(x, y1), y));
  expect_same(*r.solution, simplify(mul(c, x)));
  // Residual of y = c x is identically zero.
  EXPECT_EQ(check_ode_solution(*r.problem, *r.solution).outcome, Verdict::equivalent_symbolic);
}

TEST(Ode1Test, Rejections) {
  EXPECT_STREQ(make_ode1(pow(c, c)).reject, "constant placement");
  EXPECT_STREQ(make_ode1(add(x, num(1))).reject, "constant placement");
  // y = x + 0 c has no c after simplification.
  EXPECT_STREQ(make_ode1(add(x, mul(num(0), c))).reject, "constant placement");
}

TEST(Ode2Test, ReferenceExample) {
  Candidate r = make_ode2(add(mul(c1, x), c2));
  ASSERT_TRUE(r.ok()) << r.reject;
  expect_same(*r.problem, sym(Symbol::y2));
  EXPECT_TRUE(check_ode_solution(*r.problem, *r.solution).equivalent());
}

TEST(Ode2Test, ExponentialSolution) {
  // y = c1 exp(x) + c2 exp(-x) solves y'' - y = 0.
  Candidate r = make_ode2(add(mul(c1, exp(x)), mul(c2, exp(neg(x)))));
  ASSERT_TRUE(r.ok()) << r.reject;
  EXPECT_TRUE(check_ode_solution(*r.problem, *r.solution).equivalent());
  EXPECT_TRUE(check_equiv(*r.problem, num(0)).outcome == Verdict::not_equivalent);
}

TEST(ClearDenominatorsTest, Examples) {
  expect_same(clear_denominators(sub(div(y1, x), div(y, pow(x, num(2))))), sub(mul(x, y1), y));
  expect_same(clear_denominators(mul(num(3), sin(x))), sin(x));
  expect_same(clear_denominators(add(x, num(1))), add(num(1), x));
}

TEST(SplitContentTest, Examples) {
  auto [k, p] = split_content(mul(num(-6), pow(x, num(2))));
  EXPECT_EQ(k, -6);
  expect_same(p, pow(x, num(2)));
  auto [k2, p2] = split_content(add(x, num(1)));
  EXPECT_EQ(k2, 1);
  expect_same(p2, add(num(1), x));
}

void expect_sound_run(Task task, std::size_t count, std::uint64_t seed) {
  GenConfig cfg;
  cfg.task = task;
  cfg.count = count;
  cfg.seed = seed;
  GenResult r;
  if (task == Task::ibp) {
    GenConfig seed_cfg;
    seed_cfg.task = Task::bwd;
    seed_cfg.count = 300;
    seed_cfg.seed = seed + 1;
    PrimitiveTable table;
    for (const auto& s : generate(seed_cfg).samples)
      table.insert(decode(s.problem), decode(s.solution));
    r = generate_ibp(cfg, table);
  } else {
    r = generate(cfg);
  }
  ASSERT_EQ(r.samples.size(), count);
  std::unordered_set<std::string> keys;
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.task, task);
    EXPECT_LE(s.problem.size(), cfg.max_problem_tokens);
    EXPECT_LE(s.solution.size(), cfg.max_solution_tokens);
    EXPECT_TRUE(verify_pair(s).equivalent()) << join_tokens(s.problem) << " | " << join_tokens(s.solution);
    EXPECT_TRUE(keys.insert(normal_form_key(decode(s.problem))).second) << "duplicate problem";
  }
  EXPECT_GT(r.stats.attempts, 0u);
  EXPECT_GT(r.stats.yield(), 0.0);
}

TEST(GenerateTest, BwdSound) { expect_sound_run(Task::bwd, 60, 1); }
TEST(GenerateTest, FwdSound) { expect_sound_run(Task::fwd, 40, 2); }
TEST(GenerateTest, IbpSound) { expect_sound_run(Task::ibp, 40, 3); }
TEST(GenerateTest, Ode1Sound) { expect_sound_run(Task::ode1, 40, 4); }
TEST(GenerateTest, Ode2Sound) { expect_sound_run(Task::ode2, 20, 5); }

std::vector<std::string> lines(const GenResult& r) {
  std::vector<std::string> out;
  for (const auto& s : r.samples) out.push_back(join_tokens(s.problem) + "\t" + join_tokens(s.solution));
  return out;
}

TEST(GenerateTest, DeterministicAcrossThreadCounts) {
  GenConfig cfg;
  cfg.task = Task::bwd;
  cfg.count = 50;
  cfg.seed = 7;
  auto a = lines(generate(cfg));
  auto b = lines(generate(cfg));
  cfg.threads = 3;
  auto c = lines(generate(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  cfg.seed = 8;
  EXPECT_NE(a, lines(generate(cfg)));
}

TEST(GenerateTest, ZeroCount) {
  GenConfig cfg;
  cfg.count = 0;
  EXPECT_TRUE(generate(cfg).samples.empty());
}

TEST(GenerateTest, PathologicalProfileIsExhausted) {
  // Only integer leaves: every derivative is constant.
  GenConfig cfg;
  cfg.task = Task::bwd;
  cfg.count = 5;
  cfg.window = 500;
  cfg.profile.leaf_weights = {0.0, 1.0, 0.0};
  EXPECT_THROW(generate(cfg), GenerationExhausted);
}

TEST(ThreadsTest, FromEnvironment) {
  ::setenv("SYMFORGE_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(), 3u);
  ::setenv("SYMFORGE_THREADS", "zero", 1);
  EXPECT_EQ(threads_from_env(), 1u);
  ::unsetenv("SYMFORGE_THREADS");
  EXPECT_EQ(threads_from_env(), 1u);
}

}  // namespace
}  // namespace symforge
