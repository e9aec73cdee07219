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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prag {

enum class TaskKind {
  kBinaryClassification,
  kCategoricalClassification,
  kOrdinalClassification,
  kGeneration,
};

bool is_classification(TaskKind kind) noexcept;
std::string_view to_string(TaskKind kind) noexcept;

/// How the rendered per-entry prompts are combined with the task input.
enum class AipRule {
  kPrefixJoin,         // joined + infix + input
  kAppendPatternJoin,  // joined + infix + input, infix carries an instruction
  kTitleInjection,     // joined spliced after the quoted title in the input
};

std::string_view to_string(AipRule rule) noexcept;

enum class SplitRegime { kUserBased, kTimeBased };

std::string_view to_string(SplitRegime regime) noexcept;

/// Which text becomes the retrieval query. The whole input is the only rule
/// currently in use.
enum class QueryRule { kWholeInput };

/// Per-task schema: labels, profile fields, prompt templates and trim rules.
///
/// Templates use `{field}` placeholders. `input_template` builds a sample
/// input from a raw history entry and is used by the split builder only.
struct TaskSpec {
  std::string task_id;  // "LaMP-3", "LaMP-3U", "LaMP-3T"
  int number = 0;       // 1..7
  std::optional<SplitRegime> regime;
  TaskKind kind = TaskKind::kGeneration;
  std::vector<std::string> labels;
  std::vector<std::string> profile_schema;
  std::string ppep_template;
  AipRule aip_rule = AipRule::kPrefixJoin;
  std::string joiner = ", and ";
  std::string aip_infix;
  std::vector<std::string> trim_fields;
  std::vector<std::string> indexed_fields;
  QueryRule query_rule = QueryRule::kWholeInput;

  // Profile field holding the per-entry "output" (tag, score, title...).
  std::optional<std::string> output_field;

  // Sample construction from a history entry.
  std::string input_template;
  std::string target_field;

  bool is_classification() const noexcept {
    return prag::is_classification(kind);
  }
  bool has_label(std::string_view label) const;
};

/// The fifteen movie tags used as the categorical label set.
const std::vector<std::string>& movie_tags();

/// Looks up a built-in task by id: "LaMP-N" optionally followed by "U" or
/// "T". Throws InvalidArgument for anything else.
TaskSpec task_by_id(std::string_view task_id);

/// Placeholder names appearing in a `{field}` template, in order.
std::vector<std::string> template_placeholders(std::string_view tmpl);

/// Checks the TaskSpec invariants; returns one message per violation.
std::vector<std::string> check_task_spec(const TaskSpec& task);

}  // namespace prag
