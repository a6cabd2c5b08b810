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

// Dataset files, sidecar metadata, splitting, statistics and file scoring.
//
// A dataset file holds one sample per line: the problem tokens joined by
// single spaces, a TAB, then the solution tokens. Metadata lives next to it
// in PATH.meta.json.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "symforge/codec.hpp"
#include "symforge/evalkit.hpp"
#include "symforge/sampler.hpp"
#include "symforge/taskgen.hpp"

namespace symforge {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed line; line numbers are 1-based.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Lines and files.

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_lines(in);
}

inline std::string format_line(const SamplePair& s) {
  return join_tokens(s.problem) + '\t' + join_tokens(s.solution);
}

inline SamplePair parse_line(const std::string& line, Task task, std::size_t line_no) {
  auto tab = line.find('\t');
  if (tab == std::string::npos) throw DatasetError(line_no, "expected 2 TAB-separated fields");
  if (line.find('\t', tab + 1) != std::string::npos)
    throw DatasetError(line_no, "more than 2 TAB-separated fields");
  SamplePair s{task, split_tokens(std::string_view(line).substr(0, tab)),
               split_tokens(std::string_view(line).substr(tab + 1))};
  for (const auto* side : {&s.problem, &s.solution}) {
    try {
      decode(*side);
    } catch (const MalformedError& e) {
      throw DatasetError(line_no, std::string(side == &s.problem ? "problem" : "solution") +
                                      " does not decode: " + e.what() + " at token " +
                                      std::to_string(e.position()));
    }
  }
  return s;
}

inline std::vector<SamplePair> read_dataset(std::istream& in, Task task) {
  std::vector<SamplePair> out;
  std::size_t n = 0;
  for (const auto& line : read_lines(in)) out.push_back(parse_line(line, task, ++n));
  return out;
}

inline std::vector<SamplePair> read_dataset(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_dataset(in, task);
}

inline void write_dataset(std::ostream& out, const std::vector<SamplePair>& samples) {
  for (const auto& s : samples) out << format_line(s) << '\n';
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void write_dataset(const std::string& path, const std::vector<SamplePair>& samples) {
  std::ostringstream ss;
  write_dataset(ss, samples);
  write_text(path, ss.str());
}

// ---------------------------------------------------------------------------
// Profiles as JSON.

inline Json profile_to_json(const GenProfile& p) {
  Json ops = Json::object();
  for (Op op : kAllOps) ops[std::string(op_name(op))] = p.weight(op);
  return Json{{"name", p.name},
              {"min_ops", p.min_ops},
              {"max_ops", p.max_ops},
              {"op_weights", ops},
              {"leaf_weights",
               {{"variable", p.leaf_weights[0]},
                {"integer", p.leaf_weights[1]},
                {"constant", p.leaf_weights[2]}}},
              {"int_min", p.int_min},
              {"int_max", p.int_max},
              {"exclude_zero", p.exclude_zero},
              {"seed", p.seed}};
}

// Missing keys keep the values of the named preset (uniform by default).
inline GenProfile profile_from_json(const Json& j) {
  try {
    GenProfile p = GenProfile::preset(j.value("preset", std::string("uniform")));
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    p.min_ops = j.value("min_ops", p.min_ops);
    p.max_ops = j.value("max_ops", p.max_ops);
    if (j.contains("op_weights")) {
      for (auto& [name, w] : j.at("op_weights").items()) {
        auto op = op_from_name(name);
        if (!op) throw ProfileError("unknown operator '" + name + "'");
        p.weight(*op) = w.get<double>();
      }
    }
    if (j.contains("leaf_weights")) {
      const Json& lw = j.at("leaf_weights");
      for (auto& [name, w] : lw.items()) {
        if (name == "variable") p.leaf_weights[0] = w.get<double>();
        else if (name == "integer") p.leaf_weights[1] = w.get<double>();
        else if (name == "constant") p.leaf_weights[2] = w.get<double>();
        else throw ProfileError("unknown leaf kind '" + name + "'");
      }
    }
    p.int_min = j.value("int_min", p.int_min);
    p.int_max = j.value("int_max", p.int_max);
    p.exclude_zero = j.value("exclude_zero", p.exclude_zero);
    p.seed = j.value("seed", p.seed);
    for (double w : p.op_weights)
      if (w < 0 || !std::isfinite(w)) throw ProfileError("operator weights must be finite and >= 0");
    for (double w : p.leaf_weights)
      if (w < 0 || !std::isfinite(w)) throw ProfileError("leaf weights must be finite and >= 0");
    if (p.min_ops < 0 || p.min_ops > p.max_ops) throw ProfileError("invalid operator-count range");
    return p;
  } catch (const Json::exception& e) {
    throw ProfileError(std::string("malformed profile: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Sidecar metadata.

struct DatasetMeta {
  Task task = Task::bwd;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  GenProfile profile;
  std::string generator_version = std::string(kGeneratorVersion);
  std::size_t max_problem_tokens = 256;
  std::size_t max_solution_tokens = 256;
  GenStats stats;
};

inline std::string meta_path(const std::string& dataset_path) { return dataset_path + ".meta.json"; }

inline Json meta_to_json(const DatasetMeta& m) {
  Json rejections = Json::object();
  for (const auto& [k, v] : m.stats.rejections) rejections[k] = v;
  return Json{{"task", std::string(task_name(m.task))},
              {"seed", m.seed},
              {"count", m.count},
              {"profile", profile_to_json(m.profile)},
              {"generator_version", m.generator_version},
              {"token_caps", {{"problem", m.max_problem_tokens}, {"solution", m.max_solution_tokens}}},
              {"attempts", m.stats.attempts},
              {"yield", m.stats.yield()},
              {"rejections", rejections}};
}

// ---------------------------------------------------------------------------
// Splitting.

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  void validate() const {
    for (double f : {train, valid, test})
      if (f < 0 || f > 1) throw std::invalid_argument("split fractions must lie in [0, 1]");
    if (std::abs(train + valid + test - 1.0) > 1e-9)
      throw std::invalid_argument("split fractions must sum to 1");
  }
};

inline constexpr std::uint32_t kSplitBuckets = 10000;

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable bucket in [0, 10000) from the problem's normal form.
inline std::uint32_t split_bucket(const Expr& problem) {
  return static_cast<std::uint32_t>(fnv1a(normal_form_key(problem)) % kSplitBuckets);
}

enum class Split : std::uint8_t { train, valid, test };

inline Split assign_split(std::uint32_t bucket, const SplitSpec& spec) {
  const double b = static_cast<double>(bucket);
  const double train_end = std::round(spec.train * kSplitBuckets);
  const double valid_end = std::round((spec.train + spec.valid) * kSplitBuckets);
  if (b < train_end) return Split::train;
  if (b < valid_end) return Split::valid;
  return Split::test;
}

struct SplitResult {
  std::vector<SamplePair> train, valid, test;
};

inline SplitResult split_dataset(const std::vector<SamplePair>& samples, const SplitSpec& spec) {
  spec.validate();
  SplitResult out;
  for (const auto& s : samples) {
    switch (assign_split(split_bucket(decode(s.problem)), spec)) {
      case Split::train: out.train.push_back(s); break;
      case Split::valid: out.valid.push_back(s); break;
      case Split::test: out.test.push_back(s); break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics.

// Nearest-rank quantiles of token lengths.
inline Json length_summary(std::vector<std::size_t> xs) {
  if (xs.empty()) return Json{{"min", 0}, {"p25", 0}, {"median", 0}, {"p75", 0}, {"p95", 0},
                              {"max", 0}, {"mean", 0.0}};
  std::sort(xs.begin(), xs.end());
  auto q = [&](double p) {
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(xs.size())));
    return xs[std::clamp<std::size_t>(rank, 1, xs.size()) - 1];
  };
  double mean = 0;
  for (auto v : xs) mean += static_cast<double>(v);
  mean /= static_cast<double>(xs.size());
  return Json{{"min", xs.front()}, {"p25", q(0.25)}, {"median", q(0.5)}, {"p75", q(0.75)},
              {"p95", q(0.95)},    {"max", xs.back()}, {"mean", mean}};
}

inline Json dataset_stats(const std::vector<SamplePair>& samples) {
  std::vector<std::size_t> plen, slen;
  std::map<std::string, std::size_t> ops;
  for (Op op : kAllOps) ops[std::string(op_name(op))] = 0;
  for (const auto& s : samples) {
    plen.push_back(s.problem.size());
    slen.push_back(s.solution.size());
    for (const auto* side : {&s.problem, &s.solution})
      for (const auto& t : *side)
        if (op_from_name(t)) ++ops[t];
  }
  Json hist = Json::object();
  for (Op op : kAllOps) hist[std::string(op_name(op))] = ops[std::string(op_name(op))];
  return Json{{"count", samples.size()},
              {"problem_tokens", length_summary(plen)},
              {"solution_tokens", length_summary(slen)},
              {"operators", hist}};
}

// ---------------------------------------------------------------------------
// Scoring.

inline Json report_to_json(const EvalReport& r) {
  Json counts = Json::object();
  for (Verdict v : kAllVerdicts) {
    auto it = r.verdict_counts.find(v);
    counts[std::string(verdict_name(v))] = it == r.verdict_counts.end() ? 0 : it->second;
  }
  return Json{{"task", r.task},
              {"total", r.total},
              {"correct", r.correct},
              {"accuracy", r.accuracy()},
              {"verdict_counts", counts}};
}

class LengthMismatch : public std::runtime_error {
 public:
  LengthMismatch(std::size_t pred, std::size_t ref)
      : std::runtime_error("length mismatch: " + std::to_string(pred) + " prediction lines vs " +
                           std::to_string(ref) + " reference lines") {}
};

struct ScoreOptions {
  bool mod_constant = false;
  unsigned threads = 1;
};

// Scores one prediction against one reference line. A prediction line with a
// TAB is read as a dataset line and its second field is used. A reference
// line with a TAB carries the problem; for ODE tasks a prediction that is not
// equivalent to the reference is still correct when it solves the ODE.
inline EquivVerdict score_line(const std::string& pred_line, const std::string& ref_line,
                               Task task, bool mod_constant, std::size_t line_no) {
  auto field = [](const std::string& line) {
    auto tab = line.find('\t');
    return tab == std::string::npos ? std::string_view(line) : std::string_view(line).substr(tab + 1);
  };
  TokenSequence ref = split_tokens(field(ref_line));
  if (!try_decode(ref)) throw DatasetError(line_no, "reference does not decode");
  TokenSequence pred = split_tokens(field(pred_line));
  EquivVerdict v = check_equiv(pred, ref, mod_constant);
  auto tab = ref_line.find('\t');
  if (!v.equivalent() && is_ode_task(task) && tab != std::string::npos) {
    auto problem = try_decode(split_tokens(std::string_view(ref_line).substr(0, tab)));
    auto candidate = try_decode(pred);
    if (!problem) throw DatasetError(line_no, "reference problem does not decode");
    if (candidate) {
      EquivVerdict o = check_ode_solution(*problem, *candidate);
      if (o.equivalent()) return {o.outcome, "solves the ODE: " + o.detail};
    }
  }
  return v;
}

inline EvalReport score_lines(const std::vector<std::string>& pred,
                              const std::vector<std::string>& ref, Task task,
                              const ScoreOptions& opts = {}) {
  if (pred.size() != ref.size()) throw LengthMismatch(pred.size(), ref.size());
  std::vector<EquivVerdict> verdicts(pred.size());
  std::vector<std::string> errors(pred.size());
  unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(pred.size())));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < pred.size(); i += workers) {
      try {
        verdicts[i] = score_line(pred[i], ref[i], task, opts.mod_constant, i + 1);
      } catch (const DatasetError& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw DatasetError(i + 1, errors[i].substr(errors[i].find(": ") + 2));
  EvalReport r;
  r.task = std::string(task_name(task));
  for (const auto& v : verdicts) r.add(v, opts.mod_constant);
  return r;
}

inline EvalReport score_files(const std::string& pred_path, const std::string& ref_path, Task task,
                              const ScoreOptions& opts = {}) {
  return score_lines(read_lines(pred_path), read_lines(ref_path), task, opts);
}

// Accuracy matrix: rows are training distributions, columns test sets.
// Manifest: {"entries": [{"train", "test", "pred", "ref", "task"}, ...],
// "mod_constant": bool}.
inline Json shift_matrix(const Json& manifest, unsigned threads = 1) {
  ScoreOptions opts;
  opts.mod_constant = manifest.value("mod_constant", false);
  opts.threads = threads;
  std::vector<std::string> rows, cols;
  Json matrix = Json::object();
  for (const auto& e : manifest.at("entries")) {
    std::string train = e.at("train").get<std::string>();
    std::string test = e.at("test").get<std::string>();
    std::string task_text = e.value("task", test);
    auto task = task_from_name(task_text);
    if (!task) throw std::invalid_argument("unknown task '" + task_text + "'");
    EvalReport r = score_files(e.at("pred").get<std::string>(), e.at("ref").get<std::string>(),
                               *task, opts);
    if (std::find(rows.begin(), rows.end(), train) == rows.end()) rows.push_back(train);
    if (std::find(cols.begin(), cols.end(), test) == cols.end()) cols.push_back(test);
    matrix[train][test] = report_to_json(r);
  }
  return Json{{"rows", rows}, {"cols", cols}, {"matrix", matrix}};
}

}  // namespace symforge
