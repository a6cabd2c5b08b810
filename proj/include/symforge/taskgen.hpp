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

// Dataset generators for the five tasks: FWD, BWD and IBP integration, and
// first and second order ODEs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "symforge/calculus.hpp"
#include "symforge/codec.hpp"
#include "symforge/evalkit.hpp"
#include "symforge/expr.hpp"
#include "symforge/integrate.hpp"
#include "symforge/sampler.hpp"
#include "symforge/simplify.hpp"

namespace symforge {

inline constexpr std::string_view kGeneratorVersion = "symforge-gen/1";

enum class Task : std::uint8_t { fwd, bwd, ibp, ode1, ode2 };

inline constexpr std::array<Task, 5> kAllTasks = {Task::fwd, Task::bwd, Task::ibp, Task::ode1,
                                                  Task::ode2};

inline constexpr std::string_view task_name(Task t) {
  constexpr std::array<std::string_view, 5> names = {"fwd", "bwd", "ibp", "ode1", "ode2"};
  return names[static_cast<std::size_t>(t)];
}

inline std::optional<Task> task_from_name(std::string_view s) {
  for (Task t : kAllTasks)
    if (task_name(t) == s) return t;
  return std::nullopt;
}

inline bool is_ode_task(Task t) { return t == Task::ode1 || t == Task::ode2; }

struct SamplePair {
  Task task = Task::bwd;
  TokenSequence problem;
  TokenSequence solution;
};

class GenerationExhausted : public std::runtime_error {
 public:
  GenerationExhausted(const std::string& what, std::size_t attempts, std::size_t accepted)
      : std::runtime_error(what), attempts_(attempts), accepted_(accepted) {}
  std::size_t attempts() const { return attempts_; }
  std::size_t accepted() const { return accepted_; }

 private:
  std::size_t attempts_;
  std::size_t accepted_;
};

struct GenConfig {
  Task task = Task::bwd;
  GenProfile profile = GenProfile::preset("uniform");
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t max_problem_tokens = 256;
  std::size_t max_solution_tokens = 256;
  // Exhaustion: fewer than min_yield acceptances over a window of attempts.
  std::size_t window = 10000;
  double min_yield = 0.01;
  // Operator range for the F and G factors of integration by parts.
  int ibp_max_ops = 4;
  // Worker threads; output does not depend on it.
  unsigned threads = 1;
};

struct GenStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::map<std::string, std::size_t> rejections;

  double yield() const {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
  }
  void merge(const GenStats& o) {
    attempts += o.attempts;
    accepted += o.accepted;
    duplicates += o.duplicates;
    for (const auto& [k, v] : o.rejections) rejections[k] += v;
  }
};

struct GenResult {
  std::vector<SamplePair> samples;
  GenStats stats;
};

// Thread count from SYMFORGE_THREADS, else 1.
inline unsigned threads_from_env() {
  const char* v = std::getenv("SYMFORGE_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) return 1;
  return static_cast<unsigned>(std::min(n, 256L));
}

// ---------------------------------------------------------------------------
// Verification of a single pair.

inline EquivVerdict verify_pair(Task task, const Expr& problem, const Expr& solution) {
  if (is_ode_task(task)) return check_ode_solution(problem, solution);
  return check_equiv(differentiate(solution, Symbol::x), problem);
}

inline EquivVerdict verify_pair(const SamplePair& s) {
  auto p = try_decode(s.problem);
  auto q = try_decode(s.solution);
  if (!p || !q) return {Verdict::not_equivalent, "sample does not decode"};
  return verify_pair(s.task, *p, *q);
}

// Normal-form key used for deduplication and splitting.
inline std::string normal_form_key(const Expr& problem) {
  return to_prefix_string(simplify(problem));
}

// ---------------------------------------------------------------------------
// Algebraic helpers.

// e = content * primitive, where content is the rational coefficient of a
// product-shaped normal form.
inline std::pair<Rational, Expr> split_content(const Expr& e) {
  detail::Simplifier s(SimplifyOptions{});
  Expr n = s.run(e);
  if (n.is_op(Op::add) || n.is_op(Op::sub)) return {Rational(1), n};
  if (auto r = rational_value(n)) return {*r, num(1)};
  detail::ProductForm p = s.product_of(n);
  if (p.coef == 0) return {Rational(0), num(1)};
  return {p.coef, s.from_product(Rational(1), p.factors)};
}

// Numerator of e after clearing rational-exponent denominators across its
// terms, with any rational content removed. Used as the "= 0" form of an ODE.
inline Expr clear_denominators(const Expr& e) {
  detail::Simplifier s(SimplifyOptions{});
  Expr n = s.run(e);
  detail::SumForm sum = s.sum_of(n);
  std::map<Expr, Rational, ExprLess> denom;
  for (const auto& [mono, term] : sum.terms)
    for (const auto& f : term.factors)
      if (auto r = rational_value(f.exponent); r && *r < 0) {
        auto [it, inserted] = denom.try_emplace(f.base, Rational(-*r));
        if (!inserted && Rational(-*r) > it->second) it->second = Rational(-*r);
      }
  Expr out = n;
  if (!denom.empty()) {
    Expr d = num(1);
    for (const auto& [base, k] : denom) d = mul(d, pow(base, detail::rational_expr(k)));
    Expr acc = simplify(mul(detail::rational_expr(sum.constant), d));
    for (const auto& [mono, term] : sum.terms)
      acc = add(acc, simplify(mul(s.from_product(term.coef, term.factors), d)));
    out = simplify(acc);
  }
  auto [content, primitive] = split_content(out);
  return content == 0 ? out : primitive;
}

namespace detail {

inline Expr replace_leaf(const Expr& e, std::size_t& k, const Expr& replacement) {
  if (e.is_leaf()) return k-- == 0 ? replacement : e;
  if (e.arity() == 1) return Expr::apply(e.op(), replace_leaf(e.child(0), k, replacement));
  Expr a = replace_leaf(e.child(0), k, replacement);
  Expr b = replace_leaf(e.child(1), k, replacement);
  return Expr::apply(e.op(), std::move(a), std::move(b));
}

inline Expr replace_leaf_at(const Expr& e, std::size_t k, const Expr& replacement) {
  return replace_leaf(e, k, replacement);
}

}  // namespace detail

// Outcome of one generation attempt: a pair, or the reason it was rejected.
struct Candidate {
  std::optional<Expr> problem;
  std::optional<Expr> solution;
  const char* reject = nullptr;

  static Candidate rejected(const char* why) { return {std::nullopt, std::nullopt, why}; }
  static Candidate accepted(Expr p, Expr s) { return {std::move(p), std::move(s), nullptr}; }
  bool ok() const { return reject == nullptr; }
};

// ---------------------------------------------------------------------------
// Primitive table for integration by parts, keyed by the primitive part of
// the integrand's normal form.

class PrimitiveTable {
 public:
  // Records integral(integrand) = antiderivative.
  void insert(const Expr& integrand, const Expr& antiderivative) {
    auto [content, primitive] = split_content(integrand);
    if (content == 0) return;
    std::string key = to_prefix_string(primitive);
    if (entries_.count(key)) return;
    entries_.emplace(std::move(key),
                     simplify(mul(detail::rational_expr(Rational(1) / content), antiderivative)));
  }

  // An antiderivative of integrand, if its primitive part is known.
  std::optional<Expr> lookup(const Expr& integrand) const {
    auto [content, primitive] = split_content(integrand);
    if (content == 0) return std::nullopt;
    auto it = entries_.find(to_prefix_string(primitive));
    if (it == entries_.end()) return std::nullopt;
    return simplify(mul(detail::rational_expr(content), it->second));
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::unordered_map<std::string, Expr> entries_;
};

// ---------------------------------------------------------------------------
// Pair construction from given expressions.

namespace detail {
inline bool within(const Expr& e, std::size_t cap) { return encode(e).size() <= cap; }
}  // namespace detail

// BWD: problem F', solution F.
inline Candidate make_bwd(const Expr& sampled, const GenConfig& cfg = {}) {
  SimplifyResult F = simplify_ex(sampled);
  if (F.truncated) return Candidate::rejected("simplify ceiling");
  if (!contains(F.expr, Symbol::x)) return Candidate::rejected("solution lacks x");
  if (!detail::within(F.expr, cfg.max_solution_tokens))
    return Candidate::rejected("solution too long");
  Expr raw = differentiate_raw(F.expr, Symbol::x);
  SimplifyResult f = simplify_ex(raw);
  if (f.truncated) return Candidate::rejected("simplify ceiling");
  if (!contains(f.expr, Symbol::x)) return Candidate::rejected("constant derivative");
  if (!detail::within(f.expr, cfg.max_problem_tokens))
    return Candidate::rejected("problem too long");
  // The normal form must agree with the unsimplified derivative.
  if (!check_equiv(f.expr, raw).equivalent()) return Candidate::rejected("verification");
  if (!verify_pair(Task::bwd, f.expr, F.expr).equivalent())
    return Candidate::rejected("verification");
  return Candidate::accepted(f.expr, F.expr);
}

// FWD: problem f, solution from the rule-based integrator.
inline Candidate make_fwd(const Expr& sampled, const GenConfig& cfg = {}) {
  SimplifyResult f = simplify_ex(sampled);
  if (f.truncated) return Candidate::rejected("simplify ceiling");
  if (!contains(f.expr, Symbol::x)) return Candidate::rejected("problem lacks x");
  if (!detail::within(f.expr, cfg.max_problem_tokens))
    return Candidate::rejected("problem too long");
  auto prim = integrate_rule_based(f.expr);
  if (!prim) return Candidate::rejected("no rule");
  if (!detail::within(prim->antiderivative, cfg.max_solution_tokens))
    return Candidate::rejected("solution too long");
  if (!verify_pair(Task::fwd, f.expr, prim->antiderivative).equivalent())
    return Candidate::rejected("verification");
  return Candidate::accepted(f.expr, prim->antiderivative);
}

namespace detail {

inline Candidate finish_ode(Task task, const Expr& ode, const Expr& F, const GenConfig& cfg) {
  if (!within(ode, cfg.max_problem_tokens)) return Candidate::rejected("problem too long");
  if (!within(F, cfg.max_solution_tokens)) return Candidate::rejected("solution too long");
  if (!verify_pair(task, ode, F).equivalent()) return Candidate::rejected("residual check");
  return Candidate::accepted(ode, F);
}

inline bool constants_once(const Expr& F, std::initializer_list<Symbol> cs) {
  for (Symbol c : cs)
    if (count_symbol(F, c) != 1) return false;
  return contains(F, Symbol::x);
}

}  // namespace detail

// ODE1 from F(x, c): c = G(x, y), ODE = numerator of dG/dx.
inline Candidate make_ode1(const Expr& with_c, const GenConfig& cfg = {}) {
  SimplifyResult F = simplify_ex(with_c);
  if (F.truncated || !detail::constants_once(F.expr, {Symbol::c}))
    return Candidate::rejected("constant placement");
  auto G = isolate_leaf(sym(Symbol::y), F.expr, Symbol::c);
  if (!G) return Candidate::rejected("not invertible");
  SimplifyResult d = simplify_ex(total_derivative(G->isolated));
  if (d.truncated) return Candidate::rejected("simplify ceiling");
  Expr ode = clear_denominators(d.expr);
  if (!contains(ode, Symbol::y1)) return Candidate::rejected("not first order");
  return detail::finish_ode(Task::ode1, ode, F.expr, cfg);
}

// ODE2 from F(x, c1, c2): eliminate c2, differentiate, eliminate c1,
// differentiate again.
inline Candidate make_ode2(const Expr& with_c, const GenConfig& cfg = {}) {
  SimplifyResult F = simplify_ex(with_c);
  if (F.truncated || !detail::constants_once(F.expr, {Symbol::c1, Symbol::c2}))
    return Candidate::rejected("constant placement");
  auto G2 = isolate_leaf(sym(Symbol::y), F.expr, Symbol::c2);
  if (!G2) return Candidate::rejected("not invertible");
  SimplifyResult r = simplify_ex(total_derivative(G2->isolated));
  if (r.truncated) return Candidate::rejected("simplify ceiling");
  auto G1 = isolate_leaf(num(0), r.expr, Symbol::c1);
  if (!G1) G1 = isolate_leaf(num(0), clear_denominators(r.expr), Symbol::c1);
  if (!G1) G1 = isolate_leaf(num(0), expand(r.expr), Symbol::c1);
  if (!G1) return Candidate::rejected("not invertible");
  SimplifyResult d = simplify_ex(total_derivative(G1->isolated));
  if (d.truncated) return Candidate::rejected("simplify ceiling");
  Expr ode = clear_denominators(d.expr);
  if (!contains(ode, Symbol::y2)) return Candidate::rejected("not second order");
  return detail::finish_ode(Task::ode2, ode, F.expr, cfg);
}

// IBP: integral(F g) = F G - integral(f G), with integral(f G) from the table.
inline Candidate make_ibp(const Expr& F, const Expr& G, const PrimitiveTable& table,
                          const GenConfig& cfg = {}) {
  Expr f = differentiate(F, Symbol::x);
  Expr g = differentiate(G, Symbol::x);
  auto known = table.lookup(mul(f, G));
  if (!known) return Candidate::rejected("no table entry");
  SimplifyResult problem = simplify_ex(mul(F, g));
  SimplifyResult solution = simplify_ex(sub(mul(F, G), *known));
  if (problem.truncated || solution.truncated) return Candidate::rejected("simplify ceiling");
  if (!contains(problem.expr, Symbol::x)) return Candidate::rejected("problem lacks x");
  if (!detail::within(problem.expr, cfg.max_problem_tokens))
    return Candidate::rejected("problem too long");
  if (!detail::within(solution.expr, cfg.max_solution_tokens))
    return Candidate::rejected("solution too long");
  if (!verify_pair(Task::ibp, problem.expr, solution.expr).equivalent())
    return Candidate::rejected("verification");
  return Candidate::accepted(problem.expr, solution.expr);
}

// ---------------------------------------------------------------------------
// Random candidates.

namespace detail {

// A sampled tree with the given constants at distinct random leaves.
inline std::optional<Expr> with_constants(Sampler& sampler, std::initializer_list<Symbol> cs) {
  Expr e = sampler.sample();
  std::size_t leaves = metrics(e).leaves;
  if (leaves < cs.size()) return std::nullopt;
  std::vector<std::size_t> picks;
  while (picks.size() < cs.size()) {
    std::size_t k = uniform_below(sampler.rng(), leaves);
    if (std::find(picks.begin(), picks.end(), k) == picks.end()) picks.push_back(k);
  }
  std::size_t i = 0;
  for (Symbol c : cs) e = replace_leaf_at(e, picks[i++], sym(c));
  return e;
}

// ---------------------------------------------------------------------------
// Drivers.

// Accumulates accepted pairs with duplicate and exhaustion bookkeeping.
class Collector {
 public:
  Collector(const GenConfig& cfg, std::size_t target) : cfg_(cfg), target_(target) {}

  bool done() const { return out_.size() >= target_; }

  void record(Candidate c) {
    ++stats_.attempts;
    if (c.reject) {
      ++stats_.rejections[c.reject];
    } else if (seen_.insert(normal_form_key(*c.problem)).second) {
      ++stats_.accepted;
      ++window_accepted_;
      out_.push_back({cfg_.task, encode(*c.problem), encode(*c.solution)});
    } else {
      ++stats_.duplicates;
      ++stats_.rejections["duplicate"];
    }
    if (++window_attempts_ >= cfg_.window) {
      if (static_cast<double>(window_accepted_) <
          cfg_.min_yield * static_cast<double>(window_attempts_))
        throw GenerationExhausted(
            std::string(task_name(cfg_.task)) + ": yield below " +
                std::to_string(cfg_.min_yield * 100) + "% over " +
                std::to_string(window_attempts_) + " attempts (" +
                std::to_string(stats_.accepted) + " accepted in " +
                std::to_string(stats_.attempts) + ")",
            stats_.attempts, stats_.accepted);
      window_attempts_ = 0;
      window_accepted_ = 0;
    }
  }

  std::vector<SamplePair>& samples() { return out_; }
  GenStats& stats() { return stats_; }

 private:
  const GenConfig& cfg_;
  std::size_t target_;
  std::vector<SamplePair> out_;
  std::unordered_set<std::string> seen_;
  GenStats stats_;
  std::size_t window_attempts_ = 0;
  std::size_t window_accepted_ = 0;
};

inline Candidate try_task(Task t, Sampler& sampler, const GenConfig& cfg) {
  switch (t) {
    case Task::fwd: return make_fwd(sampler.sample(), cfg);
    case Task::bwd: return make_bwd(sampler.sample(), cfg);
    case Task::ode1: {
      auto F = with_constants(sampler, {Symbol::c});
      return F ? make_ode1(*F, cfg) : Candidate::rejected("constant placement");
    }
    case Task::ode2: {
      auto F = with_constants(sampler, {Symbol::c1, Symbol::c2});
      return F ? make_ode2(*F, cfg) : Candidate::rejected("constant placement");
    }
    case Task::ibp: break;
  }
  throw std::logic_error("try_task: integration by parts needs a primitive table");
}

struct ShardOutput {
  std::vector<SamplePair> samples;
  GenStats stats;
  std::optional<GenerationExhausted> error;
};

inline ShardOutput run_shard(const GenConfig& cfg, std::uint64_t shard, std::size_t target) {
  ShardOutput out;
  Collector col(cfg, target);
  Sampler sampler(cfg.profile, cfg.seed ^ shard);
  try {
    while (!col.done()) col.record(try_task(cfg.task, sampler, cfg));
  } catch (const GenerationExhausted& e) {
    out.error = e;
  }
  out.samples = std::move(col.samples());
  out.stats = col.stats();
  return out;
}

inline constexpr std::uint64_t kShards = 8;

}  // namespace detail

// Seed-partitioned generation: shards with seeds seed ^ i run on a worker
// pool and are merged in shard order with global deduplication. Shortfalls
// from cross-shard duplicates are filled by further shards, so the output is
// independent of the thread count.
inline GenResult generate(const GenConfig& cfg) {
  if (cfg.task == Task::ibp)
    throw std::invalid_argument("generate: use generate_ibp for integration by parts");
  GenResult result;
  std::unordered_set<std::string> seen;
  std::uint64_t next_shard = 0;
  while (result.samples.size() < cfg.count) {
    std::size_t missing = cfg.count - result.samples.size();
    std::uint64_t shards = std::min<std::uint64_t>(detail::kShards, missing);
    std::vector<std::size_t> targets(shards, missing / shards);
    for (std::size_t i = 0; i < missing % shards; ++i) ++targets[i];
    std::vector<detail::ShardOutput> outs(shards);
    unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(shards)));
    auto work = [&](unsigned w) {
      for (std::uint64_t i = w; i < shards; i += workers)
        outs[i] = detail::run_shard(cfg, next_shard + i, targets[i]);
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    next_shard += shards;
    for (auto& o : outs) {
      result.stats.merge(o.stats);
      if (o.error)
        throw GenerationExhausted(o.error->what(), result.stats.attempts, result.stats.accepted);
      for (auto& s : o.samples) {
        if (result.samples.size() >= cfg.count) break;
        if (seen.insert(normal_form_key(decode(s.problem))).second) {
          result.samples.push_back(std::move(s));
        } else {
          ++result.stats.duplicates;
          ++result.stats.rejections["duplicate"];
        }
      }
    }
    if (next_shard > 64 * detail::kShards)
      throw GenerationExhausted("generation: too many duplicate shards", result.stats.attempts,
                                result.stats.accepted);
  }
  result.stats.accepted = result.samples.size();
  return result;
}

// Integration by parts. For random F, G with f = F', g = G': when fG has a
// known primitive, integral(F g) = F G - integral(f G); symmetrically for
// f G when F g is known. Every emission is added to the table.
// Single-threaded: the table is shared state.
inline GenResult generate_ibp(const GenConfig& cfg, PrimitiveTable& table) {
  GenResult result;
  if (cfg.count == 0) return result;
  if (table.empty())
    throw GenerationExhausted("ibp: zero yield, the primitive table is empty", 0, 0);
  GenProfile small = cfg.profile;
  small.min_ops = 0;
  small.max_ops = std::max(0, cfg.ibp_max_ops);
  Sampler sampler(small, cfg.seed);
  detail::Collector col(cfg, cfg.count);

  // A factor in x; draws without x are not counted as attempts.
  auto factor = [&]() -> std::optional<Expr> {
    for (int i = 0; i < 1000; ++i) {
      SimplifyResult e = simplify_ex(sampler.sample());
      if (!e.truncated && contains(e.expr, Symbol::x)) return e.expr;
    }
    return std::nullopt;
  };

  while (!col.done()) {
    auto F = factor();
    auto G = factor();
    if (!F || !G) throw GenerationExhausted("ibp: profile yields no factors in x", 0, 0);
    // integral(F g) via f G, then integral(f G) via F g.
    for (int side = 0; side < 2 && !col.done(); ++side) {
      Candidate c = side == 0 ? make_ibp(*F, *G, table, cfg) : make_ibp(*G, *F, table, cfg);
      if (c.problem) table.insert(*c.problem, *c.solution);
      col.record(std::move(c));
    }
  }
  result.samples = std::move(col.samples());
  result.stats = col.stats();
  return result;
}

}  // namespace symforge
