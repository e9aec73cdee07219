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
#include <string>
#include <string_view>
#include <vector>

namespace prag {

/// A token and the byte range [begin, end) it was read from.
struct TokenSpan {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Tokens are maximal runs of Unicode letters and decimal digits, lowercased
// with the root-locale full case mapping. Everything else separates tokens.
// Invalid UTF-8 bytes are treated as separators.
//
// These are the "proxy tokens" used for BM25, ROUGE and prompt budgets.

std::vector<std::string> tokenize(std::string_view text);
std::vector<TokenSpan> tokenize_with_spans(std::string_view text);
std::size_t count_tokens(std::string_view text);

/// `text` unchanged when it holds at most `max_tokens` tokens; otherwise the
/// prefix ending right after the `max_tokens`-th token.
std::string_view truncate_tokens(std::string_view text, std::size_t max_tokens);

}  // namespace prag
