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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prag/model.hpp"
#include "prag/retrieval.hpp"

namespace prag {

/// Token budget of a personalized prompt, in proxy tokens.
///
/// `context` is the model context size L, `input_reserve` the share L-bar kept
/// for the task input, `k` the number of profile entries. Each entry prompt
/// may use floor((L - L-bar) / k) tokens.
struct TokenBudget {
  std::size_t context = 512;
  std::size_t input_reserve = 256;
  std::size_t k = 1;

  /// Throws InvalidArgument unless context > input_reserve, k >= 1 and the
  /// per-entry share is at least one token.
  static TokenBudget make(std::size_t context, std::size_t input_reserve,
                          std::size_t k);

  std::size_t per_entry() const noexcept {
    return (context - input_reserve) / k;
  }
};

/// A personalized model input and its bookkeeping.
struct Prompt {
  std::string text;
  std::string task_id;
  std::vector<std::string> used_entry_ids;
  std::vector<std::size_t> ppep_tokens;
  std::vector<bool> trimmed;
  std::size_t input_tokens = 0;
  std::size_t total_tokens = 0;
  bool input_truncated = false;
};

/// One rendered per-entry prompt.
struct RenderedEntry {
  std::string text;
  std::size_t tokens = 0;
  bool trimmed = false;
};

/// The retrieval query for a task input: the whole input, verbatim.
Query make_query(const TaskSpec& task, std::string_view input);

/// Fills the task's per-entry template with `entry`, then, while the result
/// exceeds `budget_tokens`, drops the trailing token of the currently longest
/// trimmable field. Template text and untrimmable fields are never touched.
///
/// Throws InvalidArgument when a placeholder is missing from the entry or
/// when the rendering with every trimmable field emptied still exceeds the
/// budget ("budget below template floor").
RenderedEntry render_ppep(const TaskSpec& task, const ProfileEntry& entry,
                          std::size_t budget_tokens);

/// Splices `joined` right after the first double-quoted segment of `input`
/// (the paper title of a citation task input), separated by one space.
std::string add_to_paper_title(std::string_view joined, std::string_view input);

/// Joins the entry prompts with the task joiner and combines them with the
/// input according to the task's aggregation rule. Only text and token
/// counts are filled in; entry ids are left to the caller.
Prompt assemble_aip(const TaskSpec& task, std::string_view input,
                    std::span<const std::string> ppeps);

struct PersonalizationConfig {
  Strategy strategy = Strategy::kBm25;
  std::size_t k = 1;
  std::size_t context = 512;
  std::size_t input_reserve = 256;
  std::uint64_t seed = 0;
  const EmbeddingProvider* embedder = nullptr;
  Bm25Params bm25;
};

/// query -> retrieve -> render each entry within its share -> aggregate.
///
/// The input keeps at most min(L-bar, L - tokens used by entry prompts and
/// joiners) tokens; when it has to be cut, its tail is dropped and
/// `input_truncated` is set. The result never exceeds L tokens.
Prompt build_personalized_input(const Sample& sample, const TaskSpec& task,
                                const PersonalizationConfig& config);

/// Baseline without retrieval: the input alone, tail-truncated to L-bar.
Prompt build_plain_input(const Sample& sample, const TaskSpec& task,
                         std::size_t input_reserve);

}  // namespace prag
