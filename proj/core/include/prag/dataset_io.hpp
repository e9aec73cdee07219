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

// Dataset file format:
//
//   {"task": "LaMP-3U",
//    "provenance": {"source": "...", ...},            (optional)
//    "samples": [{"id": s, "user_id": s, "input": s, "target": s,
//                 "profile": [{"id": s, "date": int?, "<field>": s, ...}]}]}
//
// History file format (input of the split builder):
//
//   {"task": "LaMP-2", "users": [{"user_id": s, "entries": [<entry>...]}]}
//
// An entry "date" may be an integer (epoch seconds) or a "YYYY-MM-DD" /
// "YYYY" string, which maps to midnight UTC. Dates are always written back
// as integers.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prag/model.hpp"

namespace prag {

/// Parses "YYYY-MM-DD" or "YYYY" to epoch seconds at 00:00 UTC.
std::int64_t parse_date(std::string_view text);

/// Parses a dataset document. When `task` is given, the file's task must
/// name the same task number; the given spec (with its regime) is used.
/// Every sample is validated; the first failing sample raises
/// ValidationError listing its violations.
Dataset parse_dataset(std::string_view json_text,
                      const std::optional<TaskSpec>& task = std::nullopt);

Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<TaskSpec>& task = std::nullopt);

/// Serializes with two-space indentation and a trailing newline.
std::string dump_dataset(const Dataset& dataset);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct HistoryFile {
  TaskSpec task;
  std::vector<UserHistory> users;
};

HistoryFile parse_histories(std::string_view json_text);
HistoryFile load_histories(const std::filesystem::path& path);
std::string dump_histories(const HistoryFile& file);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace prag
