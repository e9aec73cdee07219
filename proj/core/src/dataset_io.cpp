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

#include "prag/dataset_io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "prag/error.hpp"

namespace prag {

using nlohmann::json;

namespace {

using detail::parse_json;

const json& require(const json& obj, const char* key, json::value_t type,
                    const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + ": missing \"" + key + "\"");
  }
  if (it->type() != type) {
    throw ValidationError(where + ": \"" + key + "\" has the wrong type");
  }
  return *it;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

ProfileEntry entry_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": entry is not an object");
  ProfileEntry e;
  const json& id = require(j, "id", json::value_t::string, where);
  e.id = id.get<std::string>();
  const std::string ewhere = where + ", entry '" + e.id + "'";
  for (const auto& [key, value] : j.items()) {
    if (key == "id") continue;
    if (key == "date") {
      if (value.is_null()) continue;
      if (value.is_number_integer()) {
        e.date = value.get<std::int64_t>();
      } else if (value.is_string()) {
        try {
          e.date = parse_date(value.get<std::string>());
        } catch (const InvalidArgument& ex) {
          throw ValidationError(ewhere + ": " + ex.what());
        }
      } else {
        throw ValidationError(ewhere + ": \"date\" must be an integer or a date string");
      }
      continue;
    }
    if (value.is_string()) {
      e.fields.emplace(key, value.get<std::string>());
    } else {
      e.extra_json.emplace(key, value.dump());
    }
  }
  return e;
}

json entry_to_json(const ProfileEntry& e) {
  json j = json::object();
  j["id"] = e.id;
  if (e.date) j["date"] = *e.date;
  for (const auto& [k, v] : e.fields) j[k] = v;
  for (const auto& [k, v] : e.extra_json) j[k] = json::parse(v);
  return j;
}

TaskSpec resolve_task(const json& root, const std::optional<TaskSpec>& task) {
  const json& id = require(root, "task", json::value_t::string, "document");
  TaskSpec from_file = task_by_id(id.get<std::string>());
  if (!task) return from_file;
  if (task->number != from_file.number) {
    throw ValidationError("document is for task " + from_file.task_id +
                          " but " + task->task_id + " was requested");
  }
  return *task;
}

}  // namespace

std::int64_t parse_date(std::string_view text) {
  using namespace std::chrono;
  auto fail = [&]() -> InvalidArgument {
    return InvalidArgument("unrecognized date '" + std::string(text) + "'");
  };
  int y = 0;
  unsigned m = 1;
  unsigned d = 1;
  try {
    if (text.size() == 4) {
      y = static_cast<int>(parse_int(text));
    } else if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
      y = static_cast<int>(parse_int(text.substr(0, 4)));
      m = static_cast<unsigned>(parse_int(text.substr(5, 2)));
      d = static_cast<unsigned>(parse_int(text.substr(8, 2)));
    } else {
      throw fail();
    }
  } catch (const InvalidArgument&) {
    throw fail();
  }
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw fail();
  return duration_cast<seconds>(sys_days{ymd}.time_since_epoch()).count();
}

Dataset parse_dataset(std::string_view json_text,
                      const std::optional<TaskSpec>& task) {
  const json root = parse_json(json_text);
  if (!root.is_object()) throw ValidationError("document is not an object");

  Dataset ds;
  ds.task = resolve_task(root, task);
  if (const auto it = root.find("provenance"); it != root.end()) {
    if (!it->is_object()) throw ValidationError("\"provenance\" must be an object");
    for (const auto& [k, v] : it->items()) {
      ds.provenance.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
  }

  const json& samples =
      require(root, "samples", json::value_t::array, "document");
  ds.samples.reserve(samples.size());
  std::set<std::string> ids;
  std::size_t index = 0;
  for (const json& js : samples) {
    const std::string where = "sample #" + std::to_string(index++);
    if (!js.is_object()) throw ValidationError(where + ": not an object");
    Sample s;
    s.id = require(js, "id", json::value_t::string, where).get<std::string>();
    const std::string swhere = "sample '" + s.id + "'";
    s.user_id =
        require(js, "user_id", json::value_t::string, swhere).get<std::string>();
    s.input =
        require(js, "input", json::value_t::string, swhere).get<std::string>();
    s.target =
        require(js, "target", json::value_t::string, swhere).get<std::string>();
    const json& profile = require(js, "profile", json::value_t::array, swhere);
    s.profile.reserve(profile.size());
    for (const json& je : profile) s.profile.push_back(entry_from_json(je, swhere));

    if (!ids.insert(s.id).second) {
      throw ValidationError("duplicate sample id '" + s.id + "'");
    }
    const auto violations = validate_sample(s, ds.task);
    if (!violations.empty()) {
      std::string msg = "validation failed for " + swhere + ":";
      for (const auto& v : violations) msg += "\n  " + v;
      throw ValidationError(msg);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<TaskSpec>& task) {
  return parse_dataset(read_file(path), task);
}

std::string dump_dataset(const Dataset& dataset) {
  json root = json::object();
  root["task"] = dataset.task.task_id;
  if (!dataset.provenance.empty()) root["provenance"] = dataset.provenance;
  json samples = json::array();
  for (const auto& s : dataset.samples) {
    json js = json::object();
    js["id"] = s.id;
    js["user_id"] = s.user_id;
    js["input"] = s.input;
    js["target"] = s.target;
    json profile = json::array();
    for (const auto& e : s.profile) profile.push_back(entry_to_json(e));
    js["profile"] = std::move(profile);
    samples.push_back(std::move(js));
  }
  root["samples"] = std::move(samples);
  return root.dump(2) + "\n";
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, dump_dataset(dataset));
}

HistoryFile parse_histories(std::string_view json_text) {
  const json root = parse_json(json_text);
  if (!root.is_object()) throw ValidationError("document is not an object");
  HistoryFile file;
  file.task = resolve_task(root, std::nullopt);
  const json& users = require(root, "users", json::value_t::array, "document");
  std::set<std::string> user_ids;
  for (const json& ju : users) {
    UserHistory h;
    h.user_id =
        require(ju, "user_id", json::value_t::string, "user").get<std::string>();
    const std::string where = "user '" + h.user_id + "'";
    if (!user_ids.insert(h.user_id).second) {
      throw ValidationError("duplicate " + where);
    }
    std::set<std::string> entry_ids;
    for (const json& je : require(ju, "entries", json::value_t::array, where)) {
      ProfileEntry e = entry_from_json(je, where);
      if (!entry_ids.insert(e.id).second) {
        throw ValidationError(where + ": duplicate entry id '" + e.id + "'");
      }
      h.entries.push_back(std::move(e));
    }
    file.users.push_back(std::move(h));
  }
  return file;
}

HistoryFile load_histories(const std::filesystem::path& path) {
  return parse_histories(read_file(path));
}

std::string dump_histories(const HistoryFile& file) {
  json root = json::object();
  root["task"] = file.task.task_id;
  json users = json::array();
  for (const auto& u : file.users) {
    json entries = json::array();
    for (const auto& e : u.entries) entries.push_back(entry_to_json(e));
    users.push_back({{"user_id", u.user_id}, {"entries", std::move(entries)}});
  }
  root["users"] = std::move(users);
  return root.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace prag
