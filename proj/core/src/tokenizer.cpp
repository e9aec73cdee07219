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

#include <cstdint>

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace prag {

namespace {

std::string lowercase(std::string_view piece, bool ascii) {
  if (ascii) {
    std::string out(piece);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(piece.data(), static_cast<int32_t>(piece.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool ascii_alnum(UChar32 c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Calls visit(begin, end, ascii) for every token span.
template <typename Visit>
void scan(std::string_view text, Visit&& visit) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  int32_t start = -1;
  bool ascii = true;
  while (i < length) {
    const int32_t at = i;
    UChar32 c = 0;
    if (bytes[i] < 0x80) {
      c = bytes[i++];
    } else {
      U8_NEXT(bytes, i, length, c);
    }
    const bool word = c >= 0 && (c < 0x80 ? ascii_alnum(c)
                                          : (u_isalnum(c) != 0));
    if (word) {
      if (start < 0) {
        start = at;
        ascii = true;
      }
      if (c >= 0x80) ascii = false;
    } else if (start >= 0) {
      visit(static_cast<std::size_t>(start), static_cast<std::size_t>(at), ascii);
      start = -1;
    }
  }
  if (start >= 0) {
    visit(static_cast<std::size_t>(start), static_cast<std::size_t>(length), ascii);
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  scan(text, [&](std::size_t b, std::size_t e, bool ascii) {
    out.push_back(lowercase(text.substr(b, e - b), ascii));
  });
  return out;
}

std::vector<TokenSpan> tokenize_with_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  scan(text, [&](std::size_t b, std::size_t e, bool ascii) {
    out.push_back({lowercase(text.substr(b, e - b), ascii), b, e});
  });
  return out;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t n = 0;
  scan(text, [&](std::size_t, std::size_t, bool) { ++n; });
  return n;
}

std::string_view truncate_tokens(std::string_view text, std::size_t max_tokens) {
  std::size_t seen = 0;
  std::size_t cut = text.size();
  bool over = false;
  scan(text, [&](std::size_t, std::size_t e, bool) {
    if (over) return;
    if (seen == max_tokens) {
      over = true;
      return;
    }
    ++seen;
    cut = e;
  });
  if (!over) return text;
  return text.substr(0, max_tokens == 0 ? 0 : cut);
}

}  // namespace prag
