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

// Generators shared by the unit, acceptance and benchmark targets.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prag/model.hpp"
#include "prag/random.hpp"
#include "prag/task.hpp"

namespace prag::testing {

inline std::string word(std::string_view prefix, std::uint64_t i) {
  return std::string(prefix) + std::to_string(i);
}

/// `n` words drawn from `vocab` distinct words "<prefix>0".."<prefix>{vocab-1}".
inline std::string random_text(Rng& rng, std::size_t n, std::size_t vocab,
                               std::string_view prefix = "w") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != 0) out += ' ';
    out += word(prefix, rng.below(vocab));
  }
  return out;
}

inline std::string padded(std::size_t i, int width = 5) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(s.size(), width), '0') + s;
}

/// A rating dataset where each sample's answer is recoverable only from one
/// profile entry.
///
/// Every input carries a token that appears in exactly one "key" entry of the
/// profile, which also carries the marker "key<id>". Other entries use a
/// vocabulary disjoint from the inputs. In roughly `distractor_rate` of the
/// samples a short entry repeats the rare token twice without the marker, so
/// it outranks the key entry at k = 1. Gold labels cycle through "1".."5".
struct OracleDataset {
  Dataset dataset;
  std::vector<std::pair<std::string, std::string>> markers;  // marker -> gold
  std::size_t distractors = 0;
};

inline OracleDataset make_oracle_dataset(std::size_t n_samples, std::uint64_t seed,
                                         double distractor_rate = 0.05,
                                         std::size_t profile_size = 12) {
  OracleDataset out;
  out.dataset.task = task_by_id("LaMP-3U");
  out.dataset.provenance = {{"builder", "synthetic oracle"}};
  Rng rng(seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::string id = padded(i);
    const std::string rare = "zq" + id;
    const std::string marker = "key" + id;
    const std::string gold = std::to_string(i % 5 + 1);

    Sample s;
    s.id = "s" + id;
    s.user_id = "u" + id;
    s.input = "review " + rare + " " + random_text(rng, 6, 40, "in");
    s.target = gold;

    const std::size_t key_slot = rng.below(profile_size);
    for (std::size_t j = 0; j < profile_size; ++j) {
      ProfileEntry e;
      e.id = "e" + padded(j, 3);
      if (j == key_slot) {
        e.fields["text"] = marker + " " + rare + " " + random_text(rng, 5, 60, "pf");
        e.fields["score"] = gold;
      } else {
        e.fields["text"] = random_text(rng, 4 + rng.below(10), 60, "pf");
        e.fields["score"] = std::to_string(rng.below(5) + 1);
      }
      s.profile.push_back(std::move(e));
    }
    if (rng.bernoulli(distractor_rate)) {
      ProfileEntry d;
      d.id = "e999";
      d.fields["text"] = rare + " " + rare;
      d.fields["score"] = std::to_string((i + 1) % 5 + 1);
      s.profile.push_back(std::move(d));
      ++out.distractors;
    }
    out.markers.emplace_back(marker, gold);
    out.dataset.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace prag::testing
