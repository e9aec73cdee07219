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

#include "prag/lm_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "prag/error.hpp"
#include "prag/tokenizer.hpp"

namespace prag {

namespace {

class EchoClient final : public LMClient {
 public:
  std::string generate(const std::string& prompt, const GenerationParams&) override {
    return prompt;
  }
};

class FixedClient final : public LMClient {
 public:
  explicit FixedClient(std::string answer) : answer_(std::move(answer)) {}
  std::string generate(const std::string&, const GenerationParams&) override { return answer_; }

 private:
  std::string answer_;
};

class GoldIfPresentClient final : public LMClient {
 public:
  GoldIfPresentClient(std::vector<std::pair<std::string, std::string>> table,
                      std::string fallback)
      : table_(std::move(table)), fallback_(std::move(fallback)) {}

  std::string generate(const std::string& prompt, const GenerationParams&) override {
    for (const auto& [marker, answer] : table_) {
      if (prompt.find(marker) != std::string::npos) return answer;
    }
    return fallback_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> table_;
  std::string fallback_;
};

}  // namespace

void GenerationParams::check() const {
  if (max_output_tokens < 1) throw InvalidArgument("max_output_tokens must be at least 1");
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be non-negative");
  if (retry.max_attempts < 1) throw InvalidArgument("retry policy needs at least one attempt");
}

std::string http_generate(const std::string& url, const std::string& prompt,
                          const GenerationParams& params,
                          const std::optional<std::string>& api_key) {
  params.check();
  const auto parts = detail::split_url(url);
  const nlohmann::json body = {{"prompt", prompt},
                               {"max_tokens", params.max_output_tokens},
                               {"temperature", params.temperature},
                               {"stop", params.stop}};
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (api_key && !api_key->empty()) {
    headers.emplace("Authorization", "Bearer " + *api_key);
  }

  auto backoff = params.retry.initial_backoff;
  std::string last_error;
  for (std::size_t attempt = 1; attempt <= params.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(backoff.count()) * params.retry.backoff_multiplier));
    }
    httplib::Client client(parts.origin);
    client.set_connection_timeout(params.timeout);
    client.set_read_timeout(params.timeout);
    client.set_write_timeout(params.timeout);
    const auto res = client.Post(parts.path, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("LM endpoint returned HTTP " + std::to_string(res->status));
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError("LM endpoint returned a non-JSON body");
    }
    const auto it = reply.find("text");
    if (!reply.is_object() || it == reply.end() || !it->is_string()) {
      throw ProtocolError("LM reply lacks a string \"text\" member");
    }
    return it->get<std::string>();
  }
  throw TransportError("LM endpoint failed after " +
                       std::to_string(params.retry.max_attempts) + " attempt(s): " + last_error);
}

HttpLMClient::HttpLMClient(std::string url, std::optional<std::size_t> context_limit,
                           std::optional<std::string> api_key)
    : url_(std::move(url)), context_limit_(context_limit), api_key_(std::move(api_key)) {
  detail::split_url(url_);
  if (!api_key_) {
    if (const char* env = std::getenv(kLmApiKeyEnv)) api_key_ = env;
  }
}

std::string HttpLMClient::generate(const std::string& prompt, const GenerationParams& params) {
  if (context_limit_) {
    const auto n = count_tokens(prompt);
    if (n > *context_limit_) {
      throw InvalidArgument("prompt of " + std::to_string(n) + " tokens exceeds the endpoint limit of " +
                            std::to_string(*context_limit_));
    }
  }
  return http_generate(url_, prompt, params, api_key_);
}

std::unique_ptr<LMClient> mock_echo() { return std::make_unique<EchoClient>(); }

std::unique_ptr<LMClient> mock_fixed(std::string answer) {
  return std::make_unique<FixedClient>(std::move(answer));
}

std::unique_ptr<LMClient> mock_gold_if_present(
    std::vector<std::pair<std::string, std::string>> marker_answers, std::string fallback) {
  return std::make_unique<GoldIfPresentClient>(std::move(marker_answers), std::move(fallback));
}

}  // namespace prag
