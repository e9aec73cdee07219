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

// Experiment orchestration: dataset -> personalized prompts -> LM -> metrics.
//
// Config file (JSON):
//
//   {"task": "LaMP-3U", "dataset": "dev.json", "output_dir": "runs/x",
//    "mode": "personalized" | "no-retrieval", "seed": 0,
//    "retriever": {"strategy": "bm25", "k": 4, "bm25": {"k1": 1.2, "b": 0.75},
//                  "embedder": {"kind": "hashing", "dimension": 1024}},
//    "budget": {"context": 512, "input_reserve": 256},
//    "lm": {"kind": "http", "url": "http://localhost:8000/generate",
//           "context_limit": 2048, "max_output_tokens": 128,
//           "temperature": 0, "stop": [], "timeout_ms": 30000,
//           "retry": {"max_attempts": 3, "initial_backoff_ms": 200,
//                     "multiplier": 2}},
//    "concurrency": {"workers": 4, "max_requests_per_second": 0}}
//
// "lm.kind" may also be "echo", "fixed" (with "answer") or
// "gold-if-present" (with "markers": [{"marker", "answer"}...] and
// "fallback"). Omitted members take the defaults shown above.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prag/embedding.hpp"
#include "prag/lm_client.hpp"
#include "prag/metrics.hpp"
#include "prag/model.hpp"
#include "prag/prompting.hpp"
#include "prag/retrieval.hpp"

namespace prag {

enum class RunMode { kPersonalized, kNoRetrieval };

struct LmEndpoint {
  std::string kind = "http";
  std::string url;
  std::optional<std::size_t> context_limit;
  std::string answer;                                         // fixed
  std::vector<std::pair<std::string, std::string>> markers;  // gold-if-present
  std::string fallback;                                       // gold-if-present
};

struct EmbedderConfig {
  std::string kind = "hashing";  // or "http"
  std::size_t dimension = 1024;
  std::string url;
};

struct ExperimentConfig {
  std::string task_id;
  std::filesystem::path dataset;
  RunMode mode = RunMode::kPersonalized;
  Strategy strategy = Strategy::kBm25;
  std::size_t k = 1;
  std::size_t context = 512;
  std::size_t input_reserve = 256;
  std::uint64_t seed = 0;
  std::optional<EmbedderConfig> embedder;
  Bm25Params bm25;
  LmEndpoint lm;
  GenerationParams generation;
  std::filesystem::path output_dir;
  std::size_t workers = 4;
  double max_requests_per_second = 0.0;  // 0 = unlimited

  /// Field-level checks; the personalized mode also validates the budget.
  void check() const;
};

ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON of every field; parsing it yields an equal config.
std::string dump_experiment_config(const ExperimentConfig& config);

std::unique_ptr<LMClient> make_client(const LmEndpoint& endpoint);
std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config);

struct LatencyStats {
  double wall_seconds = 0.0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

struct PromptRecord {
  std::string sample_id;
  Prompt prompt;
};

struct RunArtifact {
  MetricReport report;
  std::vector<PromptRecord> prompts;  // sorted by sample id
  std::string config_echo;
  LatencyStats latency;
  std::vector<std::pair<std::string, std::string>> failures;  // id, reason
};

/// Builds each sample's prompt, queries `client`, scores the predictions.
/// Samples whose prompt or generation fails are excluded from the metrics
/// and counted in report.n_failed. Results are ordered by sample id no
/// matter how many workers ran.
RunArtifact run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                           LMClient& client, const EmbeddingProvider* embedder = nullptr);

/// Loads config.dataset (and builds the configured embedder) first.
RunArtifact run_experiment(const ExperimentConfig& config, LMClient& client);

/// {"sample_id", "prompt", "used_entry_ids", "token_counts"} on one line.
std::string prompt_audit_line(const std::string& sample_id, const Prompt& prompt);

/// Writes report.json, per_sample.csv, prompts.jsonl, config.json and
/// run_stats.json into `dir`.
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir);

}  // namespace prag
