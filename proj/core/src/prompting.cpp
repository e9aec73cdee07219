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

#include "prag/prompting.hpp"

#include <algorithm>
#include <map>

#include "prag/error.hpp"
#include "prag/tokenizer.hpp"

namespace prag {

namespace {

struct Segment {
  bool placeholder = false;
  std::string text;  // literal text or field name
};

std::vector<Segment> parse_template(std::string_view tmpl) {
  std::vector<Segment> out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    const auto close =
        open == std::string_view::npos ? open : tmpl.find('}', open + 1);
    if (open == std::string_view::npos || close == std::string_view::npos) {
      out.push_back({false, std::string(tmpl.substr(pos))});
      break;
    }
    if (open > pos) out.push_back({false, std::string(tmpl.substr(pos, open - pos))});
    out.push_back({true, std::string(tmpl.substr(open + 1, close - open - 1))});
    pos = close + 1;
  }
  return out;
}

// Trimmable field state: original value, its token spans and how many of
// those tokens are still kept.
struct TrimState {
  std::string_view value;
  std::vector<TokenSpan> spans;
  std::size_t kept = 0;

  std::string_view current() const {
    if (kept == spans.size()) return value;
    return kept == 0 ? std::string_view{} : value.substr(0, spans[kept - 1].end);
  }
};

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

TokenBudget TokenBudget::make(std::size_t context, std::size_t input_reserve,
                              std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (context <= input_reserve) {
    throw InvalidArgument("context size must exceed the input reserve");
  }
  TokenBudget b{context, input_reserve, k};
  if (b.per_entry() < 1) {
    throw InvalidArgument("per-entry budget floor((L - L_bar) / k) is below one token");
  }
  return b;
}

Query make_query(const TaskSpec& /*task*/, std::string_view input) {
  if (input.empty()) throw InvalidArgument("empty task input");
  return Query::from_text(std::string(input));
}

RenderedEntry render_ppep(const TaskSpec& task, const ProfileEntry& entry,
                          std::size_t budget_tokens) {
  const auto segments = parse_template(task.ppep_template);

  std::map<std::string, TrimState, std::less<>> trim;
  for (const auto& seg : segments) {
    if (!seg.placeholder) continue;
    const std::string* value = entry.field(seg.text);
    if (value == nullptr) {
      throw InvalidArgument("entry '" + entry.id + "' lacks template field '" +
                            seg.text + "'");
    }
    const bool trimmable = std::find(task.trim_fields.begin(), task.trim_fields.end(),
                                     seg.text) != task.trim_fields.end();
    if (trimmable && !trim.contains(seg.text)) {
      TrimState st{*value, tokenize_with_spans(*value), 0};
      st.kept = st.spans.size();
      trim.emplace(seg.text, std::move(st));
    }
  }

  auto render = [&] {
    std::string out;
    for (const auto& seg : segments) {
      if (!seg.placeholder) {
        out += seg.text;
      } else if (const auto it = trim.find(seg.text); it != trim.end()) {
        out += it->second.current();
      } else {
        out += *entry.field(seg.text);
      }
    }
    return out;
  };

  RenderedEntry result;
  result.text = render();
  result.tokens = count_tokens(result.text);
  while (result.tokens > budget_tokens) {
    const std::size_t excess = result.tokens - budget_tokens;
    for (std::size_t i = 0; i < excess; ++i) {
      TrimState* longest = nullptr;
      for (const auto& name : task.trim_fields) {
        auto it = trim.find(name);
        if (it == trim.end()) continue;
        if (longest == nullptr || it->second.kept > longest->kept) longest = &it->second;
      }
      if (longest == nullptr || longest->kept == 0) {
        throw InvalidArgument("entry '" + entry.id + "': budget below template floor (" +
                              std::to_string(budget_tokens) + " tokens)");
      }
      --longest->kept;
    }
    result.trimmed = true;
    result.text = render();
    result.tokens = count_tokens(result.text);
  }
  return result;
}

std::string add_to_paper_title(std::string_view joined, std::string_view input) {
  const auto open = input.find('"');
  const auto close = open == std::string_view::npos ? open : input.find('"', open + 1);
  if (close == std::string_view::npos) {
    throw InvalidArgument("title segment not found");
  }
  std::string out(input.substr(0, close + 1));
  if (!joined.empty()) {
    out += ' ';
    out += joined;
  }
  out += input.substr(close + 1);
  return out;
}

Prompt assemble_aip(const TaskSpec& task, std::string_view input,
                    std::span<const std::string> ppeps) {
  if (ppeps.empty()) throw InvalidArgument("no entry prompts to aggregate");
  const std::string joined = join(ppeps, task.joiner);

  Prompt p;
  p.task_id = task.task_id;
  switch (task.aip_rule) {
    case AipRule::kPrefixJoin:
    case AipRule::kAppendPatternJoin:
      p.text = joined;
      p.text += task.aip_infix;
      p.text += input;
      break;
    case AipRule::kTitleInjection:
      p.text = add_to_paper_title(joined, input);
      break;
  }
  p.ppep_tokens.reserve(ppeps.size());
  for (const auto& s : ppeps) p.ppep_tokens.push_back(count_tokens(s));
  p.input_tokens = count_tokens(input);
  p.total_tokens = count_tokens(p.text);
  return p;
}

Prompt build_personalized_input(const Sample& sample, const TaskSpec& task,
                                const PersonalizationConfig& config) {
  const auto budget =
      TokenBudget::make(config.context, config.input_reserve, config.k);
  const Query query = make_query(task, sample.input);

  RetrievalOptions options;
  options.strategy = config.strategy;
  options.k = config.k;
  options.seed = config.seed;
  options.salt = sample_salt(sample.id);
  options.embedder = config.embedder;
  options.bm25 = config.bm25;
  options.indexed_fields = task.indexed_fields;
  const auto ranked = retrieve(query, sample.profile, options);

  std::vector<std::string> ppeps;
  std::vector<std::string> ids;
  std::vector<bool> trimmed;
  std::size_t used = 0;
  for (const auto& hit : ranked.entries) {
    const auto it = std::find_if(sample.profile.begin(), sample.profile.end(),
                                 [&](const ProfileEntry& e) { return e.id == hit.entry_id; });
    auto rendered = render_ppep(task, *it, budget.per_entry());
    used += rendered.tokens;
    ppeps.push_back(std::move(rendered.text));
    ids.push_back(hit.entry_id);
    trimmed.push_back(rendered.trimmed);
  }
  used += (ppeps.size() - 1) * count_tokens(task.joiner) + count_tokens(task.aip_infix);
  if (used > budget.context) {
    throw InvalidArgument("entry prompts and joiners exceed the context size");
  }

  const std::size_t allowance = std::min(budget.input_reserve, budget.context - used);
  std::string_view input = sample.input;
  const bool cut = count_tokens(input) > allowance;
  if (cut) input = truncate_tokens(input, allowance);

  Prompt p = assemble_aip(task, input, ppeps);
  p.used_entry_ids = std::move(ids);
  p.trimmed = std::move(trimmed);
  p.input_truncated = cut;
  if (p.total_tokens > budget.context) {
    throw Error("assembled prompt exceeds the context size (" +
                std::to_string(p.total_tokens) + " > " +
                std::to_string(budget.context) + ")");
  }
  return p;
}

Prompt build_plain_input(const Sample& sample, const TaskSpec& task,
                         std::size_t input_reserve) {
  if (sample.input.empty()) throw InvalidArgument("empty task input");
  Prompt p;
  p.task_id = task.task_id;
  const std::string_view input = truncate_tokens(sample.input, input_reserve);
  p.input_truncated = input.size() != sample.input.size();
  p.text = std::string(input);
  p.input_tokens = count_tokens(p.text);
  p.total_tokens = p.input_tokens;
  return p;
}

}  // namespace prag
