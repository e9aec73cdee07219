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

// Building train/dev/test datasets out of raw per-user histories.
//
// User-based splits put every user in exactly one of train/dev/test; each
// sample's profile is the rest of that user's history. Time-based splits
// order each user's history chronologically and carve the newest entries
// into test, then dev, then train inputs; a sample only ever sees entries
// older than its own partition.
//
// Citation samples (LaMP-1) are built from entries carrying two extra JSON
// arrays: "references" (titles the paper cites) and "coauthors" (user ids).

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "prag/model.hpp"

namespace prag {

struct SplitFractions {
  double train = 0.0;
  double dev = 0.0;
  double test = 0.0;

  double sum() const noexcept { return train + dev + test; }
};

/// Which history entries become sample inputs in a user-based split.
enum class InputSelection {
  kAllEntries,  // every entry, subsampled by sample_rate
  kOneEntry,    // one random entry per user
};

/// How a time-based split sizes each user's train/dev/test partitions.
enum class TimePartition {
  kFractions,     // floor(n * fraction), at least one when the fraction > 0
  kSingleNewest,  // exactly one entry each, newest is test
};

struct SplitConfig {
  SplitRegime regime = SplitRegime::kUserBased;
  SplitFractions user_ratios{0.8, 0.1, 0.1};
  SplitFractions time_fractions{0.2, 0.1, 0.1};
  TimePartition time_partition = TimePartition::kFractions;
  InputSelection selection = InputSelection::kAllEntries;
  std::size_t min_profile = 1;
  std::optional<std::size_t> max_profile;
  double trim_top_fraction = 0.0;  // drop the users with the most entries
  double sample_rate = 1.0;
  std::optional<std::size_t> dev_subsample;
  std::optional<std::size_t> test_subsample;
  std::uint64_t seed = 0;

  // Applied to every constructed input; identity when empty. Stands in for
  // the tweet paraphrasing step of the tweet task.
  std::function<std::string(std::string_view)> input_transform;

  /// Per-task defaults for the given regime.
  static SplitConfig defaults_for(const TaskSpec& task, SplitRegime regime);

  /// Throws InvalidArgument on fractions outside [0, 1] or summing above 1,
  /// min_profile of 0, or sample_rate outside [0, 1].
  void check() const;
};

struct UserPartition {
  std::size_t profile = 0;
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
};

struct SplitManifest {
  SplitRegime regime = SplitRegime::kUserBased;
  std::uint64_t seed = 0;
  std::vector<std::string> train_users;
  std::vector<std::string> dev_users;
  std::vector<std::string> test_users;
  std::map<std::string, UserPartition> partitions;  // time-based only
  std::vector<std::string> skipped_users;           // too little history
};

struct SplitOutput {
  Dataset train;
  Dataset dev;
  Dataset test;
  SplitManifest manifest;
};

/// Keeps users with min_profile <= |entries| <= max_profile, then drops the
/// ceil(trim_top_fraction * N) users with the most entries (ties broken by
/// user id). Input order is preserved.
std::vector<UserHistory> filter_users(const std::vector<UserHistory>& histories,
                                      const SplitConfig& config);

SplitOutput user_based_split(const std::vector<UserHistory>& histories,
                             const TaskSpec& task, const SplitConfig& config);

SplitOutput time_based_split(const std::vector<UserHistory>& histories,
                             const TaskSpec& task, const SplitConfig& config);

/// filter_users followed by the split matching config.regime.
SplitOutput build_splits(const std::vector<UserHistory>& histories,
                         const TaskSpec& task, const SplitConfig& config);

/// author id -> every title that author's papers cite.
using CoauthorPool = std::map<std::string, std::set<std::string>>;

CoauthorPool build_coauthor_pool(const std::vector<UserHistory>& histories);

/// One citation-identification sample for `user`.
///
/// Picks a paper with references (or `paper_id` when given) and one of its
/// references as the positive. The negative is a title cited by a random
/// co-author of that paper, falling back to random pool authors, that the
/// user never cites. Positive and negative are placed in random order and
/// the target names the positive's position ("[1]" or "[2]"). The profile is
/// the user's other papers. Throws InvalidArgument when no paper has
/// references or no eligible negative exists.
Sample make_citation_pair(const UserHistory& user, const CoauthorPool& pool,
                          std::uint64_t seed,
                          const std::optional<std::string>& paper_id = std::nullopt);

/// Manifest as a JSON document.
std::string dump_manifest(const SplitManifest& manifest);

}  // namespace prag
