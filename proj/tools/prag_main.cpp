/*
 * Copyright 2026 The prag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prag/dataset_io.hpp"
#include "prag/error.hpp"
#include "prag/metrics.hpp"
#include "prag/prompting.hpp"
#include "prag/runner.hpp"
#include "prag/splits.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailedSamples = 3;
constexpr int kExitError = 1;

struct RunArgs {
  fs::path config;
  std::optional<fs::path> output_dir;
  std::optional<std::size_t> workers;
};

struct SplitArgs {
  fs::path histories;
  fs::path out;
  std::string regime = "user";
  std::uint64_t seed = 0;
  std::optional<std::size_t> dev_subsample;
  std::optional<std::size_t> test_subsample;
  std::optional<std::size_t> min_profile;
  std::optional<std::size_t> max_profile;
};

struct PromptArgs {
  fs::path dataset;
  std::optional<fs::path> out;
  std::string strategy = "bm25";
  std::size_t k = 1;
  std::size_t context = 512;
  std::size_t input_reserve = 256;
  std::uint64_t seed = 0;
  bool no_retrieval = false;
};

struct EvalArgs {
  fs::path dataset;
  fs::path predictions;
  std::optional<fs::path> out;
};

int cmd_run(const RunArgs& args) {
  prag::ExperimentConfig config = prag::load_experiment_config(args.config);
  if (config.dataset.is_relative()) {
    config.dataset = args.config.parent_path() / config.dataset;
  }
  if (args.output_dir) config.output_dir = *args.output_dir;
  if (args.workers) config.workers = *args.workers;
  if (config.output_dir.empty()) throw prag::InvalidArgument("no output directory given");

  const auto client = prag::make_client(config.lm);
  const prag::RunArtifact artifact = prag::run_experiment(config, *client);
  prag::write_artifact(artifact, config.output_dir);

  const auto& r = artifact.report;
  std::cout << r.task_id << ": " << r.n << " scored, " << r.n_failed << " failed\n";
  for (const auto& [name, value] : r.metrics) std::cout << "  " << name << " = " << value << "\n";
  for (const auto& [id, why] : artifact.failures) {
    std::cerr << "failed " << id << ": " << why << "\n";
  }
  return r.n_failed == 0 ? 0 : kExitFailedSamples;
}

int cmd_split(const SplitArgs& args) {
  const prag::HistoryFile file = prag::load_histories(args.histories);
  prag::SplitRegime regime;
  if (args.regime == "user") {
    regime = prag::SplitRegime::kUserBased;
  } else if (args.regime == "time") {
    regime = prag::SplitRegime::kTimeBased;
  } else {
    throw prag::InvalidArgument("regime must be 'user' or 'time'");
  }
  const prag::TaskSpec task = prag::task_by_id(
      "LaMP-" + std::to_string(file.task.number) +
      (regime == prag::SplitRegime::kUserBased ? "U" : "T"));
  prag::SplitConfig config = prag::SplitConfig::defaults_for(task, regime);
  config.seed = args.seed;
  config.dev_subsample = args.dev_subsample;
  config.test_subsample = args.test_subsample;
  if (args.min_profile) config.min_profile = *args.min_profile;
  if (args.max_profile) config.max_profile = *args.max_profile;

  const prag::SplitOutput out = prag::build_splits(file.users, task, config);
  prag::save_dataset(out.train, args.out / "train.json");
  prag::save_dataset(out.dev, args.out / "dev.json");
  prag::save_dataset(out.test, args.out / "test.json");
  prag::write_file(args.out / "manifest.json", prag::dump_manifest(out.manifest));
  std::cout << task.task_id << ": train " << out.train.samples.size() << ", dev "
            << out.dev.samples.size() << ", test " << out.test.samples.size() << ", skipped "
            << out.manifest.skipped_users.size() << " users\n";
  return 0;
}

int cmd_prompt(const PromptArgs& args) {
  const prag::Dataset ds = prag::load_dataset(args.dataset);
  prag::PersonalizationConfig pc;
  pc.strategy = prag::strategy_from_string(args.strategy);
  pc.k = args.k;
  pc.context = args.context;
  pc.input_reserve = args.input_reserve;
  pc.seed = args.seed;
  std::unique_ptr<prag::EmbeddingProvider> embedder;
  if (pc.strategy == prag::Strategy::kEmbedding) {
    embedder = std::make_unique<prag::HashingEmbedder>();
    pc.embedder = embedder.get();
  }

  std::vector<const prag::Sample*> order;
  for (const auto& s : ds.samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const prag::Sample* a, const prag::Sample* b) { return a->id < b->id; });

  std::string lines;
  int failures = 0;
  for (const auto* s : order) {
    try {
      const prag::Prompt p = args.no_retrieval
                                 ? prag::build_plain_input(*s, ds.task, args.input_reserve)
                                 : prag::build_personalized_input(*s, ds.task, pc);
      lines += prag::prompt_audit_line(s->id, p);
    } catch (const std::exception& e) {
      std::cerr << "failed " << s->id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  if (args.out) {
    prag::write_file(*args.out, lines);
  } else {
    std::cout << lines;
  }
  return failures == 0 ? 0 : kExitFailedSamples;
}

int cmd_eval(const EvalArgs& args) {
  const prag::Dataset ds = prag::load_dataset(args.dataset);
  std::map<std::string, std::string> predictions;
  const std::string text = prag::read_file(args.predictions);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
      predictions[j.at("sample_id").get<std::string>()] = j.at("prediction").get<std::string>();
    } catch (const json::exception& e) {
      throw prag::ParseError("predictions: " + std::string(e.what()), line_no, 1);
    }
  }

  std::vector<prag::PredictionRecord> records;
  prag::MetricReport missing;
  for (const auto& s : ds.samples) {
    const auto it = predictions.find(s.id);
    if (it == predictions.end()) {
      missing.failed_sample_ids.push_back(s.id);
      continue;
    }
    records.push_back({s.id, it->second, s.target});
  }
  if (records.empty()) throw prag::InvalidArgument("no prediction matches a dataset sample");
  prag::MetricReport report = prag::evaluate_run(ds.task, records);
  report.n_failed = missing.failed_sample_ids.size();
  report.failed_sample_ids = std::move(missing.failed_sample_ids);

  if (args.out) {
    prag::write_file(*args.out / "report.json", prag::dump_report(report));
    prag::write_file(*args.out / "per_sample.csv", prag::per_sample_csv(report));
  } else {
    std::cout << prag::dump_report(report);
  }
  return report.n_failed == 0 ? 0 : kExitFailedSamples;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented personalization of language model prompts"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a JSON config");
  run_cmd->add_option("-c,--config", run.config, "Experiment config")->required()->check(
      CLI::ExistingFile);
  run_cmd->add_option("-o,--output-dir", run.output_dir, "Overrides config output_dir");
  run_cmd->add_option("-w,--workers", run.workers, "Overrides concurrency.workers");

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Build train/dev/test datasets from histories");
  split_cmd->add_option("histories", split.histories, "History JSON")->required()->check(
      CLI::ExistingFile);
  split_cmd->add_option("-o,--out", split.out, "Output directory")->required();
  split_cmd->add_option("-r,--regime", split.regime, "user or time")
      ->check(CLI::IsMember({"user", "time"}));
  split_cmd->add_option("-s,--seed", split.seed);
  split_cmd->add_option("--dev-subsample", split.dev_subsample);
  split_cmd->add_option("--test-subsample", split.test_subsample);
  split_cmd->add_option("--min-profile", split.min_profile, "Overrides the task's minimum history");
  split_cmd->add_option("--max-profile", split.max_profile, "Overrides the task's maximum history");

  PromptArgs prompt;
  auto* prompt_cmd = app.add_subcommand("prompt", "Render personalized prompts as JSONL");
  prompt_cmd->add_option("dataset", prompt.dataset, "Dataset JSON")->required()->check(
      CLI::ExistingFile);
  prompt_cmd->add_option("-o,--out", prompt.out, "Output file, stdout when omitted");
  prompt_cmd->add_option("--strategy", prompt.strategy, "bm25, recency, random or embedding");
  prompt_cmd->add_option("-k", prompt.k, "Retrieved entries");
  prompt_cmd->add_option("--context", prompt.context, "Context size in proxy tokens");
  prompt_cmd->add_option("--input-reserve", prompt.input_reserve, "Tokens reserved for input");
  prompt_cmd->add_option("-s,--seed", prompt.seed);
  prompt_cmd->add_flag("--no-retrieval", prompt.no_retrieval, "Input only, no profile");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a predictions JSONL against a dataset");
  eval_cmd->add_option("dataset", eval.dataset, "Dataset JSON with gold targets")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("predictions", eval.predictions,
                       "JSONL of {\"sample_id\", \"prediction\"}")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--out", eval.out, "Directory for report.json and per_sample.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*split_cmd) return cmd_split(split);
    if (*prompt_cmd) return cmd_prompt(prompt);
    if (*eval_cmd) return cmd_eval(eval);
  } catch (const prag::ParseError& e) {
    std::cerr << "error (line " << e.line() << ", column " << e.column() << "): " << e.what()
              << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
