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

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prag {

/// Environment variable holding the bearer token for HTTP LM endpoints.
inline constexpr const char* kLmApiKeyEnv = "PRAG_LM_API_KEY";

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
};

struct GenerationParams {
  std::size_t max_output_tokens = 128;
  double temperature = 0.0;
  std::vector<std::string> stop;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;

  /// Throws InvalidArgument unless max_output_tokens >= 1, temperature >= 0
  /// and at least one attempt is allowed.
  void check() const;
};

/// Text generation backend. generate() may be called from several threads
/// at once; failures are thrown, never returned as partial text.
class LMClient {
 public:
  virtual ~LMClient() = default;

  virtual std::string generate(const std::string& prompt, const GenerationParams& params) = 0;

  /// Hard prompt limit in proxy tokens, if the backend declares one.
  virtual std::optional<std::size_t> context_limit() const { return std::nullopt; }
};

/// One POST of {"prompt", "max_tokens", "temperature", "stop"} expecting
/// {"text": ...}. Transport failures and 5xx replies are retried according
/// to params.retry; other 4xx replies fail at once.
///
/// Throws TransportError once retries are exhausted (or on a 4xx) and
/// ProtocolError when the reply body is not the expected JSON.
std::string http_generate(const std::string& url, const std::string& prompt,
                          const GenerationParams& params,
                          const std::optional<std::string>& api_key = std::nullopt);

class HttpLMClient final : public LMClient {
 public:
  /// `api_key` defaults to the PRAG_LM_API_KEY environment variable.
  explicit HttpLMClient(std::string url, std::optional<std::size_t> context_limit = std::nullopt,
                        std::optional<std::string> api_key = std::nullopt);

  std::string generate(const std::string& prompt, const GenerationParams& params) override;
  std::optional<std::size_t> context_limit() const override { return context_limit_; }

 private:
  std::string url_;
  std::optional<std::size_t> context_limit_;
  std::optional<std::string> api_key_;
};

// Deterministic test doubles.

/// Returns the prompt unchanged.
std::unique_ptr<LMClient> mock_echo();

/// Always returns `answer`.
std::unique_ptr<LMClient> mock_fixed(std::string answer);

/// Returns the answer paired with the first marker found in the prompt, or
/// `fallback` when no marker occurs.
std::unique_ptr<LMClient> mock_gold_if_present(
    std::vector<std::pair<std::string, std::string>> marker_answers, std::string fallback);

}  // namespace prag
