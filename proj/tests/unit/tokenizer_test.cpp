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
#include "prag/tokenizer.hpp"

#include <gtest/gtest.h>

namespace prag {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(tokenize("The CAT sat."), (Tokens{"the", "cat", "sat"}));
}

TEST(Tokenize, EmptyText) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" .,;- ").empty());
}

TEST(Tokenize, SplitsHyphenatedWordsAndKeepsDigits) {
  EXPECT_EQ(tokenize("state-of-the-art 2023"),
            (Tokens{"state", "of", "the", "art", "2023"}));
}

TEST(Tokenize, UnicodeLettersAreLowercased) {
  EXPECT_EQ(tokenize("Éclair ÜBER straße"), (Tokens{"éclair", "über", "straße"}));
  EXPECT_EQ(tokenize("ΑΒΓ δ"), (Tokens{"αβγ", "δ"}));
}

TEST(Tokenize, InvalidUtf8IsASeparator) {
  EXPECT_EQ(tokenize("ab\xff" "cd"), (Tokens{"ab", "cd"}));
}

TEST(Tokenize, SpansPointIntoTheSource) {
  const std::string text = "Hi, there!";
  const auto spans = tokenize_with_spans(text);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(text.substr(spans[0].begin, spans[0].end - spans[0].begin), "Hi");
  EXPECT_EQ(spans[1].text, "there");
  EXPECT_EQ(spans[1].begin, 4u);
  EXPECT_EQ(spans[1].end, 9u);
}

TEST(CountTokens, MatchesTokenize) {
  for (const char* s : {"", "a", "a b  c", "x-y-z!", "Ünïcode wörds 42"}) {
    EXPECT_EQ(count_tokens(s), tokenize(s).size()) << s;
  }
}

TEST(TruncateTokens, KeepsShortTextVerbatim) {
  EXPECT_EQ(truncate_tokens("one two.", 2), "one two.");
  EXPECT_EQ(truncate_tokens("one two.", 5), "one two.");
}

TEST(TruncateTokens, CutsAfterTheLastKeptToken) {
  EXPECT_EQ(truncate_tokens("one, two, three", 2), "one, two");
  EXPECT_EQ(truncate_tokens("one two", 0), "");
  EXPECT_EQ(count_tokens(truncate_tokens("a b c d e f", 3)), 3u);
}

}  // namespace
}  // namespace prag
