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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prag/task.hpp"

namespace prag {

/// One historical item of a user: an input/output pair and its metadata.
///
/// `fields` holds string-valued members (title, text, score, ...). Members
/// of any other JSON type are kept verbatim, serialized, in `extra_json` so
/// that a load/save cycle never drops them.
struct ProfileEntry {
  std::string id;
  std::map<std::string, std::string> fields;
  std::optional<std::int64_t> date;  // seconds since epoch, UTC
  std::map<std::string, std::string> extra_json;

  /// Pointer to the field value, or nullptr when the field is absent.
  const std::string* field(std::string_view name) const;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// The unit the pipeline processes: input x, target y and profile P_u.
struct Sample {
  std::string id;
  std::string user_id;
  std::string input;
  std::string target;
  std::vector<ProfileEntry> profile;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  TaskSpec task;
  std::vector<Sample> samples;
  std::map<std::string, std::string> provenance;

  const Sample* find(std::string_view sample_id) const;
};

/// Raw per-user history used to build datasets. Entries carry the full
/// input/output record; split builders decide which become inputs.
struct UserHistory {
  std::string user_id;
  std::vector<ProfileEntry> entries;

  friend bool operator==(const UserHistory&, const UserHistory&) = default;
};

/// Returns one message per violated Sample/ProfileEntry invariant. Each
/// message names the offending sample or entry and the rule.
std::vector<std::string> validate_sample(const Sample& sample,
                                         const TaskSpec& task);

/// Structural equality of two datasets (task id, samples, provenance).
bool same_content(const Dataset& a, const Dataset& b);

}  // namespace prag
