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

#include "prag/model.hpp"

#include <algorithm>
#include <set>

namespace prag {

const std::string* ProfileEntry::field(std::string_view name) const {
  const auto it = fields.find(std::string(name));
  return it == fields.end() ? nullptr : &it->second;
}

const Sample* Dataset::find(std::string_view sample_id) const {
  const auto it =
      std::find_if(samples.begin(), samples.end(),
                   [&](const Sample& s) { return s.id == sample_id; });
  return it == samples.end() ? nullptr : &*it;
}

std::vector<std::string> validate_sample(const Sample& sample,
                                         const TaskSpec& task) {
  std::vector<std::string> out;
  const std::string where = "sample '" + sample.id + "'";

  if (sample.id.empty()) out.emplace_back("sample with empty id");
  if (sample.input.empty()) out.emplace_back(where + ": input is empty");

  if (task.is_classification() && !task.has_label(sample.target)) {
    std::string set;
    for (const auto& l : task.labels) {
      if (!set.empty()) set += ", ";
      set += l;
    }
    out.emplace_back(where + ": target '" + sample.target +
                     "' not in label set {" + set + "}");
  }

  std::set<std::string> seen;
  const bool needs_dates = task.regime == SplitRegime::kTimeBased;
  for (const auto& entry : sample.profile) {
    const std::string ewhere = where + ", entry '" + entry.id + "'";
    if (entry.id.empty()) {
      out.emplace_back(where + ": profile entry with empty id");
    } else if (!seen.insert(entry.id).second) {
      out.emplace_back(where + ": duplicate profile entry id '" + entry.id +
                       "'");
    }
    for (const auto& name : task.profile_schema) {
      const std::string* value = entry.field(name);
      if (value == nullptr) {
        out.emplace_back(ewhere + ": missing required field '" + name + "'");
      } else if (value->empty()) {
        out.emplace_back(ewhere + ": required field '" + name + "' is empty");
      }
    }
    if (needs_dates && !entry.date) {
      out.emplace_back(ewhere + ": time-based task requires a date");
    }
    if (task.output_field) {
      const std::string* output = entry.field(*task.output_field);
      if (output != nullptr && *output == sample.input) {
        out.emplace_back(ewhere + ": input equals the entry's '" +
                         *task.output_field + "' (target leakage)");
      }
    }
  }
  return out;
}

bool same_content(const Dataset& a, const Dataset& b) {
  return a.task.task_id == b.task.task_id && a.samples == b.samples &&
         a.provenance == b.provenance;
}

}  // namespace prag
