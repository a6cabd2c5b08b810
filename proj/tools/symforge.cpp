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

// symforge: dataset generation, verification, scoring and inspection.
//
// Exit codes: 0 success, 1 usage, 2 I/O or malformed input, 3 generation
// exhausted or internal error, 4 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "symforge/dataset.hpp"
#include "symforge/taskgen.hpp"

namespace {

using namespace symforge;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;
constexpr int kExitVerify = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Task parse_task(const std::string& s) {
  auto t = task_from_name(s);
  if (!t) throw UsageError("unknown task '" + s + "' (expected fwd, bwd, ibp, ode1 or ode2)");
  return *t;
}

// A preset name or a path to a JSON profile.
GenProfile load_profile(const std::string& spec) {
  try {
    return GenProfile::preset(spec);
  } catch (const ProfileError&) {
  }
  if (!std::filesystem::exists(spec)) throw UsageError("unknown profile '" + spec + "'");
  std::ifstream in(spec);
  if (!in) throw IoError("cannot open profile '" + spec + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("profile '" + spec + "' is not valid JSON: " + e.what());
  }
  try {
    return profile_from_json(j);
  } catch (const ProfileError& e) {
    throw UsageError(e.what());
  }
}

void write_atomically(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  write_text(tmp, text);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

void emit_json(const Json& j, const std::string& out_path) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_atomically(out_path, text);
  }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string task;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string profile = "uniform";
  int max_ops = -1;
  int min_ops = -1;
  int ibp_max_ops = 4;
  std::string out;
  std::string seed_table;
};

int run_generate(const GenerateArgs& a) {
  GenConfig cfg;
  cfg.task = parse_task(a.task);
  cfg.count = a.count;
  cfg.seed = a.seed;
  cfg.profile = load_profile(a.profile);
  cfg.profile.seed = a.seed;
  if (a.max_ops >= 0) {
    cfg.profile.max_ops = a.max_ops;
    cfg.profile.min_ops = std::min(cfg.profile.min_ops, a.max_ops);
  }
  if (a.min_ops >= 0) cfg.profile.min_ops = a.min_ops;
  if (cfg.profile.min_ops > cfg.profile.max_ops) throw UsageError("--min-ops exceeds --max-ops");
  cfg.ibp_max_ops = a.ibp_max_ops;
  cfg.threads = threads_from_env();

  GenResult r;
  if (cfg.task == Task::ibp) {
    PrimitiveTable table;
    if (!a.seed_table.empty())
      for (const auto& s : read_dataset(a.seed_table, Task::bwd))
        table.insert(decode(s.problem), decode(s.solution));
    std::cerr << "ibp: primitive table seeded with " << table.size() << " entries\n";
    r = generate_ibp(cfg, table);
  } else {
    r = generate(cfg);
  }

  std::ostringstream data;
  write_dataset(data, r.samples);
  write_atomically(a.out, data.str());
  DatasetMeta meta;
  meta.task = cfg.task;
  meta.seed = cfg.seed;
  meta.count = r.samples.size();
  meta.profile = cfg.profile;
  meta.max_problem_tokens = cfg.max_problem_tokens;
  meta.max_solution_tokens = cfg.max_solution_tokens;
  meta.stats = r.stats;
  write_atomically(meta_path(a.out), meta_to_json(meta).dump(2) + "\n");
  std::cerr << task_name(cfg.task) << ": wrote " << r.samples.size() << " samples after "
            << r.stats.attempts << " attempts (yield " << r.stats.yield() * 100 << "%)\n";
  return 0;
}

int run_verify(const std::string& in, const std::string& task_text) {
  Task task = parse_task(task_text);
  auto samples = read_dataset(in, task);
  std::vector<std::size_t> failed;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EquivVerdict v = verify_pair(samples[i]);
    bool dup = !seen.insert(normal_form_key(decode(samples[i].problem))).second;
    if (!v.equivalent() || dup) {
      failed.push_back(i + 1);
      std::cerr << "line " << i + 1 << ": "
                << (dup ? std::string("duplicate problem") : std::string(verdict_name(v.outcome)) + ", " + v.detail)
                << "\n";
    }
  }
  Json j{{"task", std::string(task_name(task))},
         {"total", samples.size()},
         {"passed", samples.size() - failed.size()},
         {"failed", failed.size()},
         {"failed_lines", failed}};
  std::cout << j.dump(2) << "\n";
  return failed.empty() ? 0 : kExitVerify;
}

int run_eval(const std::string& pred, const std::string& ref, const std::string& task_text,
             bool mod_constant, const std::string& out) {
  Task task = parse_task(task_text);
  ScoreOptions opts;
  opts.mod_constant = mod_constant;
  opts.threads = threads_from_env();
  emit_json(report_to_json(score_files(pred, ref, task, opts)), out);
  return 0;
}

int run_split(const std::string& in, const std::string& prefix_arg, const SplitSpec& spec) {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto samples = read_dataset(in, Task::bwd);
  SplitResult s = split_dataset(samples, spec);
  std::string prefix = prefix_arg.empty() ? in : prefix_arg;
  for (auto [name, part] : {std::pair{"train", &s.train}, {"valid", &s.valid}, {"test", &s.test}}) {
    std::ostringstream ss;
    write_dataset(ss, *part);
    write_atomically(prefix + "." + name, ss.str());
  }
  Json j{{"train", s.train.size()}, {"valid", s.valid.size()}, {"test", s.test.size()},
         {"files", {prefix + ".train", prefix + ".valid", prefix + ".test"}}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_stats(const std::string& in, const std::string& out) {
  emit_json(dataset_stats(read_dataset(in, Task::bwd)), out);
  return 0;
}

int run_shift(const std::string& manifest_path, const std::string& out) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open '" + manifest_path + "' for reading");
  Json manifest;
  try {
    manifest = Json::parse(in);
    emit_json(shift_matrix(manifest, threads_from_env()), out);
  } catch (const Json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }
  return 0;
}

int run_vocab(const std::string& out) {
  std::ostringstream ss;
  Vocabulary::standard().write(ss);
  if (out.empty()) {
    std::cout << ss.str();
  } else {
    write_atomically(out, ss.str());
  }
  return 0;
}

int run_profile(const std::string& name, const std::string& out) {
  emit_json(profile_to_json(load_profile(name)), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symforge: symbolic mathematics dataset forge and evaluator"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a verified dataset file");
  generate->add_option("--task", gen.task, "fwd, bwd, ibp, ode1 or ode2")->required();
  generate->add_option("--count", gen.count, "Number of samples")->required();
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--profile", gen.profile,
                       "Preset (uniform, poly, trig, log) or JSON profile path");
  generate->add_option("--max-ops", gen.max_ops, "Largest operator count per sampled tree");
  generate->add_option("--min-ops", gen.min_ops, "Smallest operator count per sampled tree");
  generate->add_option("--ibp-max-ops", gen.ibp_max_ops,
                       "Largest operator count of the F and G factors (ibp)");
  generate->add_option("--seed-table", gen.seed_table,
                       "Integration dataset seeding the primitive table (ibp)");
  generate->add_option("--out", gen.out, "Output dataset path")->required();

  std::string in, task, pred, ref, out, prefix, manifest, name = "uniform";
  bool mod_constant = false;
  SplitSpec spec;

  auto* verify = app.add_subcommand("verify", "Re-check every sample of a dataset file");
  verify->add_option("--in", in, "Dataset path")->required();
  verify->add_option("--task", task, "Task of the dataset")->required();

  auto* eval = app.add_subcommand("eval", "Score predictions against references");
  eval->add_option("--pred", pred, "Prediction file")->required();
  eval->add_option("--ref", ref, "Reference dataset file")->required();
  eval->add_option("--task", task, "Task of the reference set")->required();
  eval->add_flag("--mod-constant", mod_constant, "Credit answers off by a constant");
  eval->add_option("--out", out, "Write the JSON report here instead of stdout");

  auto* split = app.add_subcommand("split", "Hash-split a dataset into train/valid/test");
  split->add_option("--in", in, "Dataset path")->required();
  split->add_option("--train", spec.train, "Train fraction");
  split->add_option("--valid", spec.valid, "Validation fraction");
  split->add_option("--test", spec.test, "Test fraction");
  split->add_option("--out-prefix", prefix, "Prefix of the output files (default: input path)");

  auto* stats = app.add_subcommand("stats", "Length quantiles and operator histogram");
  stats->add_option("--in", in, "Dataset path")->required();
  stats->add_option("--out", out, "Write JSON here instead of stdout");

  auto* shift = app.add_subcommand("shift", "Distribution-shift accuracy matrix");
  shift->add_option("--manifest", manifest, "JSON manifest of scoring runs")->required();
  shift->add_option("--out", out, "Write JSON here instead of stdout");

  auto* vocab = app.add_subcommand("vocab", "Write the token vocabulary, one token per line");
  vocab->add_option("--out", out, "Output path (default: stdout)");

  auto* profile = app.add_subcommand("profile", "Print a generation profile as JSON");
  profile->add_option("--name", name, "Preset name or JSON profile path");
  profile->add_option("--out", out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*verify) return run_verify(in, task);
    if (*eval) return run_eval(pred, ref, task, mod_constant, out);
    if (*split) return run_split(in, prefix, spec);
    if (*stats) return run_stats(in, out);
    if (*shift) return run_shift(manifest, out);
    if (*vocab) return run_vocab(out);
    if (*profile) return run_profile(name, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ProfileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const LengthMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const GenerationExhausted& e) {
    std::cerr << "error: generation exhausted: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
