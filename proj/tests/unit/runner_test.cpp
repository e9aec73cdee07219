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
#include <atomic>
#include <filesystem>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "prag/dataset_io.hpp"
#include "prag/error.hpp"
#include "prag/runner.hpp"
#include "support/synthetic.hpp"

namespace prag {
namespace {

using namespace std::chrono_literals;

// Local HTTP server on an ephemeral port, stopped on destruction.
class StubServer {
 public:
  StubServer() { port_ = server_.bind_to_any_port("127.0.0.1"); }
  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Server& server() { return server_; }

  void start() {
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  std::string url(const std::string& path = "/generate") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

GenerationParams fast_params() {
  GenerationParams p;
  p.timeout = 2s;
  p.retry.initial_backoff = 1ms;
  return p;
}

TEST(Mocks, Echo) {
  auto c = mock_echo();
  EXPECT_EQ(c->generate("prompt text", {}), "prompt text");
}

TEST(Mocks, Fixed) {
  auto c = mock_fixed("4");
  EXPECT_EQ(c->generate("a", {}), "4");
  EXPECT_EQ(c->generate("b", {}), "4");
}

TEST(Mocks, GoldIfPresent) {
  auto c = mock_gold_if_present({{"key1", "3"}, {"key2", "5"}}, "1");
  EXPECT_EQ(c->generate("x key2 y", {}), "5");
  EXPECT_EQ(c->generate("x key1 y", {}), "3");
  EXPECT_EQ(c->generate("nothing", {}), "1");
}

TEST(GenerationParams, Checks) {
  GenerationParams p;
  EXPECT_EQ(p.max_output_tokens, 128u);
  EXPECT_EQ(p.temperature, 0.0);
  EXPECT_NO_THROW(p.check());
  p.max_output_tokens = 0;
  EXPECT_THROW(p.check(), InvalidArgument);
  p = {};
  p.temperature = -0.1;
  EXPECT_THROW(p.check(), InvalidArgument);
}

TEST(HttpGenerate, EchoServer) {
  StubServer stub;
  nlohmann::json seen;
  stub.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(nlohmann::json{{"text", seen["prompt"]}}.dump(), "application/json");
  });
  stub.start();
  auto params = fast_params();
  params.stop = {"\n"};
  EXPECT_EQ(http_generate(stub.url(), "hello there", params), "hello there");
  EXPECT_EQ(seen["max_tokens"], 128);
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["stop"], nlohmann::json::array({"\n"}));
}

TEST(HttpGenerate, RetriesServerErrors) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 500;
      return;
    }
    res.set_content(R"({"text": "ok"})", "application/json");
  });
  stub.start();
  EXPECT_EQ(http_generate(stub.url(), "p", fast_params()), "ok");
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpGenerate, GivesUpAfterMaxAttempts) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 503;
  });
  stub.start();
  EXPECT_THROW(http_generate(stub.url(), "p", fast_params()), TransportError);
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpGenerate, ClientErrorsAreNotRetried) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  stub.start();
  EXPECT_THROW(http_generate(stub.url(), "p", fast_params()), TransportError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpGenerate, TimeoutIsATransportError) {
  StubServer stub;
  stub.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(600ms);
    res.set_content(R"({"text": "late"})", "application/json");
  });
  stub.start();
  auto params = fast_params();
  params.timeout = 100ms;
  params.retry.max_attempts = 1;
  EXPECT_THROW(http_generate(stub.url(), "p", params), TransportError);
}

TEST(HttpGenerate, NonJsonBodyIsAProtocolError) {
  StubServer stub;
  stub.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>", "text/html");
  });
  stub.start();
  EXPECT_THROW(http_generate(stub.url(), "p", fast_params()), ProtocolError);
}

TEST(HttpGenerate, SendsTheBearerToken) {
  StubServer stub;
  std::string auth;
  stub.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"text": "ok"})", "application/json");
  });
  stub.start();
  HttpLMClient client(stub.url(), std::nullopt, std::string("secret"));
  EXPECT_EQ(client.generate("p", fast_params()), "ok");
  EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpLMClient, EnforcesTheContextLimit) {
  HttpLMClient client("http://127.0.0.1:9/generate", 3);
  EXPECT_THROW(client.generate("one two three four", fast_params()), InvalidArgument);
}

TEST(HttpEmbedder, ParsesVectors) {
  StubServer stub;
  stub.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& t : body["texts"]) {
      vectors.push_back({static_cast<double>(t.get<std::string>().size()), 1.0});
    }
    res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
  });
  stub.start();
  const HttpEmbedder embedder(stub.url("/embed"), 2, 2s);
  const std::vector<std::string> texts = {"ab", "abcd"};
  const auto v = embedder.embed(texts);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], (Embedding{4.0, 1.0}));
  const HttpEmbedder wrong_dim(stub.url("/embed"), 3, 2s);
  EXPECT_THROW(wrong_dim.embed(texts), ProtocolError);
}

TEST(ExperimentConfig, DefaultsAndRoundTrip) {
  const auto c = parse_experiment_config(
      R"({"task": "LaMP-3U", "dataset": "d.json", "lm": {"kind": "echo"}})");
  EXPECT_EQ(c.mode, RunMode::kPersonalized);
  EXPECT_EQ(c.strategy, Strategy::kBm25);
  EXPECT_EQ(c.k, 1u);
  EXPECT_EQ(c.context, 512u);
  EXPECT_EQ(c.input_reserve, 256u);
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.generation.max_output_tokens, 128u);
  const auto again = parse_experiment_config(dump_experiment_config(c));
  EXPECT_EQ(dump_experiment_config(again), dump_experiment_config(c));
}

TEST(ExperimentConfig, Rejections) {
  EXPECT_THROW(parse_experiment_config(R"({"task": "LaMP-9", "dataset": "d"})"), InvalidArgument);
  EXPECT_THROW(parse_experiment_config(R"({"task": "LaMP-3", "dataset": "d", "mode": "x"})"),
               ValidationError);
  EXPECT_THROW(parse_experiment_config(R"({"task": "LaMP-3", "dataset": "d",
                                           "lm": {"kind": "http"}})"),
               InvalidArgument);
  EXPECT_THROW(parse_experiment_config(R"({"task": "LaMP-3", "dataset": "d",
                                           "lm": {"kind": "echo"},
                                           "budget": {"context": 256}})"),
               InvalidArgument);
  EXPECT_THROW(parse_experiment_config(R"({"task": "LaMP-3", "dataset": "d",
                                           "lm": {"kind": "echo"},
                                           "retriever": {"strategy": "embedding"}})"),
               InvalidArgument);
  EXPECT_THROW(parse_experiment_config("{\"task\": "), ParseError);
}

ExperimentConfig mock_config(const std::string& task) {
  ExperimentConfig c;
  c.task_id = task;
  c.dataset = "unused.json";
  c.lm.kind = "fixed";
  return c;
}

TEST(RunExperiment, ScoresEverySampleInIdOrder) {
  const auto oracle = testing::make_oracle_dataset(40, 1);
  auto client = mock_gold_if_present(oracle.markers, "1");
  auto c = mock_config("LaMP-3U");
  c.k = 2;
  const auto a = run_experiment(c, oracle.dataset, *client);
  EXPECT_EQ(a.report.n, 40u);
  EXPECT_EQ(a.report.n_failed, 0u);
  EXPECT_EQ(a.report.metrics.at("accuracy"), 1.0);
  ASSERT_EQ(a.prompts.size(), 40u);
  for (std::size_t i = 1; i < a.report.per_sample.size(); ++i) {
    EXPECT_LT(a.report.per_sample[i - 1].sample_id, a.report.per_sample[i].sample_id);
  }
}

class FlakyClient final : public LMClient {
 public:
  std::string generate(const std::string& prompt, const GenerationParams&) override {
    if (prompt.find("zq00003") != std::string::npos) throw TransportError("endpoint down");
    return "2";
  }
};

TEST(RunExperiment, FailedSamplesAreCountedNotScored) {
  const auto oracle = testing::make_oracle_dataset(10, 2);
  FlakyClient client;
  const auto a = run_experiment(mock_config("LaMP-3U"), oracle.dataset, client);
  EXPECT_EQ(a.report.n + a.report.n_failed, 10u);
  EXPECT_EQ(a.report.n_failed, 1u);
  EXPECT_EQ(a.report.failed_sample_ids, (std::vector<std::string>{"s00003"}));
  ASSERT_EQ(a.failures.size(), 1u);
  EXPECT_NE(a.failures[0].second.find("endpoint down"), std::string::npos);
}

TEST(RunExperiment, NoRetrievalPromptIsTheInput) {
  const auto oracle = testing::make_oracle_dataset(5, 3);
  auto client = mock_echo();
  auto c = mock_config("LaMP-3U");
  c.mode = RunMode::kNoRetrieval;
  const auto a = run_experiment(c, oracle.dataset, *client);
  for (const auto& p : a.prompts) {
    EXPECT_EQ(p.prompt.text, oracle.dataset.find(p.sample_id)->input);
  }
}

TEST(RunExperiment, WorkerCountDoesNotChangeTheReport) {
  const auto oracle = testing::make_oracle_dataset(60, 4);
  auto client = mock_gold_if_present(oracle.markers, "1");
  auto c = mock_config("LaMP-3U");
  c.workers = 1;
  const auto one = run_experiment(c, oracle.dataset, *client);
  c.workers = 8;
  const auto eight = run_experiment(c, oracle.dataset, *client);
  EXPECT_EQ(dump_report(one.report), dump_report(eight.report));
}

TEST(RunExperiment, WritesTheArtifactFiles) {
  const auto oracle = testing::make_oracle_dataset(3, 5);
  auto client = mock_fixed("3");
  const auto a = run_experiment(mock_config("LaMP-3U"), oracle.dataset, *client);
  const auto dir = std::filesystem::temp_directory_path() / "prag_runner_test";
  std::filesystem::remove_all(dir);
  write_artifact(a, dir);
  for (const char* f : {"report.json", "per_sample.csv", "prompts.jsonl", "config.json",
                        "run_stats.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto first = nlohmann::json::parse(read_file(dir / "prompts.jsonl").substr(
      0, read_file(dir / "prompts.jsonl").find('\n')));
  EXPECT_EQ(first["sample_id"], "s00000");
  EXPECT_EQ(first["used_entry_ids"].size(), 1u);
  EXPECT_EQ(read_file(dir / "config.json"), a.config_echo);
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, LoadsTheDatasetNamedInTheConfig) {
  auto c = mock_config("LaMP-3U");
  c.dataset = std::string(PRAG_TEST_DATA_DIR) + "/lamp3_small.json";
  c.k = 2;
  auto client = mock_fixed("5");
  const auto a = run_experiment(c, *client);
  EXPECT_EQ(a.report.n, 3u);
  EXPECT_NEAR(a.report.metrics.at("accuracy"), 1.0 / 3.0, 1e-12);
  c.dataset = "/nonexistent/file.json";
  EXPECT_THROW(run_experiment(c, *client), InvalidArgument);
}

}  // namespace
}  // namespace prag
