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

#include "prag/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "json_util.hpp"
#include "prag/dataset_io.hpp"
#include "prag/error.hpp"

namespace prag {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: \"") + key + "\" has the wrong type");
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  const auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_object()) {
    throw ValidationError(std::string("config: \"") + key + "\" must be an object");
  }
  return *it;
}

// Spaces out request starts to honour a requests-per-second cap.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second) {
    if (per_second > 0.0) {
      interval_ = std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(1.0 / per_second));
    }
  }

  void acquire() {
    if (interval_ == Clock::duration::zero()) return;
    Clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = Clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mu_;
  Clock::duration interval_{};
  Clock::time_point next_{};
};

struct Outcome {
  std::optional<Prompt> prompt;
  std::optional<std::string> prediction;
  std::string error;
  double latency_ms = 0.0;
};

double percentile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())) - 1.0);
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

void ExperimentConfig::check() const {
  task_by_id(task_id);
  if (dataset.empty()) throw InvalidArgument("config: dataset path is required");
  generation.check();
  if (workers < 1) throw InvalidArgument("config: workers must be at least 1");
  if (max_requests_per_second < 0.0) {
    throw InvalidArgument("config: max_requests_per_second must be non-negative");
  }
  if (mode == RunMode::kPersonalized) {
    TokenBudget::make(context, input_reserve, k);
    if (strategy == Strategy::kEmbedding && !embedder) {
      throw InvalidArgument("config: embedding retrieval needs an \"embedder\"");
    }
  }
  if (lm.kind == "http" && lm.url.empty()) throw InvalidArgument("config: lm.url is required");
  if (lm.kind != "http" && lm.kind != "echo" && lm.kind != "fixed" &&
      lm.kind != "gold-if-present") {
    throw InvalidArgument("config: unknown lm.kind '" + lm.kind + "'");
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  const json root = detail::parse_json(json_text);
  if (!root.is_object()) throw ValidationError("config must be a JSON object");

  ExperimentConfig c;
  c.task_id = get_or<std::string>(root, "task", "");
  c.dataset = get_or<std::string>(root, "dataset", "");
  c.output_dir = get_or<std::string>(root, "output_dir", "");
  c.seed = get_or<std::uint64_t>(root, "seed", 0);
  const auto mode = get_or<std::string>(root, "mode", "personalized");
  if (mode == "personalized") {
    c.mode = RunMode::kPersonalized;
  } else if (mode == "no-retrieval") {
    c.mode = RunMode::kNoRetrieval;
  } else {
    throw ValidationError("config: unknown mode '" + mode + "'");
  }

  const json& retriever = section(root, "retriever");
  c.strategy = strategy_from_string(get_or<std::string>(retriever, "strategy", "bm25"));
  c.k = get_or<std::size_t>(retriever, "k", 1);
  const json& bm25 = section(retriever, "bm25");
  c.bm25.k1 = get_or<double>(bm25, "k1", 1.2);
  c.bm25.b = get_or<double>(bm25, "b", 0.75);
  if (retriever.contains("embedder")) {
    const json& e = section(retriever, "embedder");
    EmbedderConfig ec;
    ec.kind = get_or<std::string>(e, "kind", "hashing");
    ec.dimension = get_or<std::size_t>(e, "dimension", 1024);
    ec.url = get_or<std::string>(e, "url", "");
    c.embedder = ec;
  }

  const json& budget = section(root, "budget");
  c.context = get_or<std::size_t>(budget, "context", 512);
  c.input_reserve = get_or<std::size_t>(budget, "input_reserve", 256);

  const json& lm = section(root, "lm");
  c.lm.kind = get_or<std::string>(lm, "kind", "http");
  c.lm.url = get_or<std::string>(lm, "url", "");
  if (lm.contains("context_limit") && !lm["context_limit"].is_null()) {
    c.lm.context_limit = get_or<std::size_t>(lm, "context_limit", 0);
  }
  c.lm.answer = get_or<std::string>(lm, "answer", "");
  c.lm.fallback = get_or<std::string>(lm, "fallback", "");
  if (const auto it = lm.find("markers"); it != lm.end()) {
    if (!it->is_array()) throw ValidationError("config: lm.markers must be an array");
    for (const auto& m : *it) {
      c.lm.markers.emplace_back(get_or<std::string>(m, "marker", ""),
                                get_or<std::string>(m, "answer", ""));
    }
  }
  c.generation.max_output_tokens = get_or<std::size_t>(lm, "max_output_tokens", 128);
  c.generation.temperature = get_or<double>(lm, "temperature", 0.0);
  c.generation.stop = get_or<std::vector<std::string>>(lm, "stop", {});
  c.generation.timeout = std::chrono::milliseconds(get_or<long long>(lm, "timeout_ms", 30000));
  const json& retry = section(lm, "retry");
  c.generation.retry.max_attempts = get_or<std::size_t>(retry, "max_attempts", 3);
  c.generation.retry.initial_backoff =
      std::chrono::milliseconds(get_or<long long>(retry, "initial_backoff_ms", 200));
  c.generation.retry.backoff_multiplier = get_or<double>(retry, "multiplier", 2.0);

  const json& conc = section(root, "concurrency");
  c.workers = get_or<std::size_t>(conc, "workers", 4);
  c.max_requests_per_second = get_or<double>(conc, "max_requests_per_second", 0.0);

  c.check();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path));
}

std::string dump_experiment_config(const ExperimentConfig& c) {
  json retriever = {{"strategy", std::string(to_string(c.strategy))},
                    {"k", c.k},
                    {"bm25", {{"k1", c.bm25.k1}, {"b", c.bm25.b}}}};
  if (c.embedder) {
    retriever["embedder"] = {{"kind", c.embedder->kind},
                             {"dimension", c.embedder->dimension},
                             {"url", c.embedder->url}};
  }
  json markers = json::array();
  for (const auto& [m, a] : c.lm.markers) markers.push_back({{"marker", m}, {"answer", a}});
  json lm = {{"kind", c.lm.kind},
             {"url", c.lm.url},
             {"context_limit", c.lm.context_limit ? json(*c.lm.context_limit) : json(nullptr)},
             {"answer", c.lm.answer},
             {"markers", std::move(markers)},
             {"fallback", c.lm.fallback},
             {"max_output_tokens", c.generation.max_output_tokens},
             {"temperature", c.generation.temperature},
             {"stop", c.generation.stop},
             {"timeout_ms", c.generation.timeout.count()},
             {"retry",
              {{"max_attempts", c.generation.retry.max_attempts},
               {"initial_backoff_ms", c.generation.retry.initial_backoff.count()},
               {"multiplier", c.generation.retry.backoff_multiplier}}}};
  json root = {{"task", c.task_id},
               {"dataset", c.dataset.string()},
               {"output_dir", c.output_dir.string()},
               {"mode", c.mode == RunMode::kPersonalized ? "personalized" : "no-retrieval"},
               {"seed", c.seed},
               {"retriever", std::move(retriever)},
               {"budget", {{"context", c.context}, {"input_reserve", c.input_reserve}}},
               {"lm", std::move(lm)},
               {"concurrency",
                {{"workers", c.workers}, {"max_requests_per_second", c.max_requests_per_second}}}};
  return root.dump(2) + "\n";
}

std::unique_ptr<LMClient> make_client(const LmEndpoint& endpoint) {
  if (endpoint.kind == "http") {
    return std::make_unique<HttpLMClient>(endpoint.url, endpoint.context_limit);
  }
  if (endpoint.kind == "echo") return mock_echo();
  if (endpoint.kind == "fixed") return mock_fixed(endpoint.answer);
  if (endpoint.kind == "gold-if-present") {
    return mock_gold_if_present(endpoint.markers, endpoint.fallback);
  }
  throw InvalidArgument("unknown LM kind '" + endpoint.kind + "'");
}

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config) {
  if (config.kind == "hashing") return std::make_unique<HashingEmbedder>(config.dimension);
  if (config.kind == "http") return std::make_unique<HttpEmbedder>(config.url, config.dimension);
  throw InvalidArgument("unknown embedder kind '" + config.kind + "'");
}

RunArtifact run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                           LMClient& client, const EmbeddingProvider* embedder) {
  config.check();
  const TaskSpec& task = dataset.task;

  // Process in sample-id order so every output is ordered the same way.
  std::vector<const Sample*> order;
  order.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const Sample* a, const Sample* b) { return a->id < b->id; });

  PersonalizationConfig pc;
  pc.strategy = config.strategy;
  pc.k = config.k;
  pc.context = config.context;
  pc.input_reserve = config.input_reserve;
  pc.seed = config.seed;
  pc.bm25 = config.bm25;
  pc.embedder = config.strategy == Strategy::kEmbedding ? embedder : nullptr;
  if (config.mode == RunMode::kPersonalized && config.strategy == Strategy::kEmbedding &&
      embedder == nullptr) {
    throw InvalidArgument("embedding retrieval needs an embedder");
  }

  std::vector<Outcome> outcomes(order.size());
  std::atomic<std::size_t> next{0};
  RateLimiter limiter(config.max_requests_per_second);

  auto work = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) {
      const Sample& sample = *order[i];
      Outcome& out = outcomes[i];
      try {
        out.prompt = config.mode == RunMode::kPersonalized
                         ? build_personalized_input(sample, task, pc)
                         : build_plain_input(sample, task, config.input_reserve);
        limiter.acquire();
        const auto start = Clock::now();
        out.prediction = client.generate(out.prompt->text, config.generation);
        out.latency_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  const auto wall_start = Clock::now();
  const std::size_t n_workers = std::min(config.workers, std::max<std::size_t>(order.size(), 1));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  const double wall =
      std::chrono::duration<double>(Clock::now() - wall_start).count();

  RunArtifact artifact;
  artifact.config_echo = dump_experiment_config(config);
  std::vector<PredictionRecord> records;
  std::vector<double> latencies;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Sample& sample = *order[i];
    Outcome& out = outcomes[i];
    if (out.prompt) artifact.prompts.push_back({sample.id, *out.prompt});
    if (out.prediction) {
      records.push_back({sample.id, *out.prediction, sample.target});
      latencies.push_back(out.latency_ms);
    } else {
      artifact.failures.emplace_back(sample.id, out.error);
    }
  }

  if (!records.empty()) {
    artifact.report = evaluate_run(task, records);
  } else {
    artifact.report.task_id = task.task_id;
  }
  artifact.report.n_failed = artifact.failures.size();
  for (const auto& [id, why] : artifact.failures) artifact.report.failed_sample_ids.push_back(id);

  std::sort(latencies.begin(), latencies.end());
  artifact.latency.wall_seconds = wall;
  if (!latencies.empty()) {
    artifact.latency.mean_ms =
        std::accumulate(latencies.begin(), latencies.end(), 0.0) /
        static_cast<double>(latencies.size());
    artifact.latency.p50_ms = percentile(latencies, 0.5);
    artifact.latency.p95_ms = percentile(latencies, 0.95);
    artifact.latency.max_ms = latencies.back();
  }
  return artifact;
}

RunArtifact run_experiment(const ExperimentConfig& config, LMClient& client) {
  config.check();
  if (!std::filesystem::exists(config.dataset)) {
    throw InvalidArgument("dataset '" + config.dataset.string() + "' does not exist");
  }
  const Dataset dataset = load_dataset(config.dataset, task_by_id(config.task_id));
  std::unique_ptr<EmbeddingProvider> embedder;
  if (config.mode == RunMode::kPersonalized && config.strategy == Strategy::kEmbedding) {
    embedder = make_embedder(*config.embedder);
  }
  return run_experiment(config, dataset, client, embedder.get());
}

std::string prompt_audit_line(const std::string& sample_id, const Prompt& prompt) {
  const json j = {{"sample_id", sample_id},
                  {"prompt", prompt.text},
                  {"used_entry_ids", prompt.used_entry_ids},
                  {"token_counts",
                   {{"ppep", prompt.ppep_tokens},
                    {"input", prompt.input_tokens},
                    {"total", prompt.total_tokens}}},
                  {"trimmed", prompt.trimmed},
                  {"input_truncated", prompt.input_truncated}};
  return j.dump() + "\n";
}

void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", dump_report(artifact.report));
  write_file(dir / "per_sample.csv", per_sample_csv(artifact.report));
  std::string prompts;
  for (const auto& p : artifact.prompts) prompts += prompt_audit_line(p.sample_id, p.prompt);
  write_file(dir / "prompts.jsonl", prompts);
  write_file(dir / "config.json", artifact.config_echo);

  json failures = json::array();
  for (const auto& [id, why] : artifact.failures) {
    failures.push_back({{"sample_id", id}, {"error", why}});
  }
  const json stats = {{"wall_seconds", artifact.latency.wall_seconds},
                      {"latency_ms",
                       {{"mean", artifact.latency.mean_ms},
                        {"p50", artifact.latency.p50_ms},
                        {"p95", artifact.latency.p95_ms},
                        {"max", artifact.latency.max_ms}}},
                      {"failures", std::move(failures)}};
  write_file(dir / "run_stats.json", stats.dump(2) + "\n");
}

}  // namespace prag
