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

#include "prag/task.hpp"

#include <algorithm>

#include "prag/error.hpp"

namespace prag {

namespace {

constexpr std::string_view kPrefix = "LaMP-";

std::string tag_prompt_list() {
  std::string out = "[";
  const auto& tags = movie_tags();
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i != 0) out += ", ";
    out += tags[i];
  }
  out += "]";
  return out;
}

TaskSpec base_spec(int number) {
  TaskSpec t;
  t.number = number;
  switch (number) {
    case 1:
      t.kind = TaskKind::kBinaryClassification;
      t.labels = {"[1]", "[2]"};
      t.profile_schema = {"title", "abstract"};
      t.ppep_template = "\"{title}\"";
      t.aip_rule = AipRule::kTitleInjection;
      t.indexed_fields = {"title", "abstract"};
      t.input_template =
          "For an author who has written the paper with the title "
          "\"{title}\", which reference is related? Just answer with [1] or "
          "[2] without explanation. [1]: \"{ref1}\" [2]: \"{ref2}\"";
      break;
    case 2:
      t.kind = TaskKind::kCategoricalClassification;
      t.labels = movie_tags();
      t.profile_schema = {"description", "tag"};
      t.ppep_template = "the tag for the movie: \"{description}\" is \"{tag}\"";
      t.aip_infix = ". ";
      t.trim_fields = {"description"};
      t.indexed_fields = {"description"};
      t.output_field = "tag";
      t.input_template =
          "Which tag does this movie relate to among the following tags? "
          "Just answer with the tag name without further explanation. tags: " +
          tag_prompt_list() + " description: {description}";
      t.target_field = "tag";
      break;
    case 3:
      t.kind = TaskKind::kOrdinalClassification;
      t.labels = {"1", "2", "3", "4", "5"};
      t.profile_schema = {"text", "score"};
      t.ppep_template = "{score} is the score for \"{text}\"";
      t.aip_infix = ". ";
      t.trim_fields = {"text"};
      t.indexed_fields = {"text"};
      t.output_field = "score";
      t.input_template =
          "What is the score of the following review on a scale of 1 to 5? "
          "just answer with 1, 2, 3, 4, or 5 without further explanation. "
          "review: {text}";
      t.target_field = "score";
      break;
    case 4:
    case 6:
      t.kind = TaskKind::kGeneration;
      t.profile_schema = {"title", "text"};
      t.ppep_template = "\"{title}\" is the title for \"{text}\"";
      t.aip_infix = ". ";
      t.trim_fields = {"text"};
      t.indexed_fields = {"title", "text"};
      t.output_field = "title";
      t.input_template = number == 4
                             ? "Generate a headline for the following article: {text}"
                             : "Generate a subject for the following email: {text}";
      t.target_field = "title";
      break;
    case 5:
      t.kind = TaskKind::kGeneration;
      t.profile_schema = {"title", "abstract"};
      t.ppep_template = "\"{title}\" is the title for \"{abstract}\"";
      t.aip_rule = AipRule::kAppendPatternJoin;
      t.aip_infix = ". Following the given patterns ";
      t.trim_fields = {"abstract"};
      t.indexed_fields = {"title", "abstract"};
      t.output_field = "title";
      t.input_template =
          "Generate a title for the following abstract of a paper: {abstract}";
      t.target_field = "title";
      break;
    case 7:
      t.kind = TaskKind::kGeneration;
      t.profile_schema = {"text"};
      t.ppep_template = "\"{text}\"";
      t.aip_rule = AipRule::kAppendPatternJoin;
      t.aip_infix = " are written by a person. Following the given patterns ";
      t.trim_fields = {"text"};
      t.indexed_fields = {"text"};
      t.output_field = "text";
      t.input_template =
          "Paraphrase the following tweet without any explanation before or "
          "after it: {text}";
      t.target_field = "text";
      break;
    default:
      throw InvalidArgument("unknown task number " + std::to_string(number));
  }
  return t;
}

}  // namespace

bool is_classification(TaskKind kind) noexcept {
  return kind != TaskKind::kGeneration;
}

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::kBinaryClassification: return "binary-classification";
    case TaskKind::kCategoricalClassification: return "categorical-classification";
    case TaskKind::kOrdinalClassification: return "ordinal-classification";
    case TaskKind::kGeneration: return "generation";
  }
  return "unknown";
}

std::string_view to_string(AipRule rule) noexcept {
  switch (rule) {
    case AipRule::kPrefixJoin: return "prefix-join";
    case AipRule::kAppendPatternJoin: return "append-pattern-join";
    case AipRule::kTitleInjection: return "title-injection";
  }
  return "unknown";
}

std::string_view to_string(SplitRegime regime) noexcept {
  return regime == SplitRegime::kUserBased ? "user-based" : "time-based";
}

bool TaskSpec::has_label(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

const std::vector<std::string>& movie_tags() {
  static const std::vector<std::string> tags = {
      "sci-fi",        "based on a book", "comedy",
      "action",        "twist ending",    "dystopia",
      "dark comedy",   "classic",         "psychology",
      "fantasy",       "romance",         "thought-provoking",
      "social commentary", "violence",    "true story",
  };
  return tags;
}

TaskSpec task_by_id(std::string_view task_id) {
  if (!task_id.starts_with(kPrefix) || task_id.size() < kPrefix.size() + 1) {
    throw InvalidArgument("unknown task id '" + std::string(task_id) + "'");
  }
  std::string_view rest = task_id.substr(kPrefix.size());
  const char digit = rest.front();
  if (digit < '1' || digit > '7') {
    throw InvalidArgument("unknown task id '" + std::string(task_id) + "'");
  }
  std::optional<SplitRegime> regime;
  if (rest.size() == 2 && rest[1] == 'U') {
    regime = SplitRegime::kUserBased;
  } else if (rest.size() == 2 && rest[1] == 'T') {
    regime = SplitRegime::kTimeBased;
  } else if (rest.size() != 1) {
    throw InvalidArgument("unknown task id '" + std::string(task_id) + "'");
  }
  TaskSpec t = base_spec(digit - '0');
  t.task_id = std::string(task_id);
  t.regime = regime;
  return t;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    const auto close = tmpl.find('}', pos + 1);
    if (close == std::string_view::npos) break;
    names.emplace_back(tmpl.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return names;
}

std::vector<std::string> check_task_spec(const TaskSpec& task) {
  std::vector<std::string> problems;
  const bool classification = task.is_classification();
  if (classification == task.labels.empty()) {
    problems.emplace_back("labels must be present iff the task is a classification task");
  }
  const std::size_t expected_labels[] = {0, 2, 15, 5};
  if (task.number >= 1 && task.number <= 3 &&
      task.labels.size() != expected_labels[task.number]) {
    problems.emplace_back("task " + task.task_id + " needs " +
                          std::to_string(expected_labels[task.number]) +
                          " labels");
  }
  auto in_schema = [&](const std::string& f) {
    return std::find(task.profile_schema.begin(), task.profile_schema.end(),
                     f) != task.profile_schema.end();
  };
  for (const auto& name : template_placeholders(task.ppep_template)) {
    if (!in_schema(name)) {
      problems.emplace_back("placeholder {" + name +
                            "} is not in the profile schema");
    }
  }
  for (const auto& f : task.trim_fields) {
    if (f == "title" || f == "score" || f == "tag") {
      problems.emplace_back("field '" + f + "' may not be trimmed");
    }
  }
  return problems;
}

}  // namespace prag
