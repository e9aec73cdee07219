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

#include <algorithm>
#include <cmath>

#include "prag/error.hpp"
#include "prag/retrieval.hpp"
#include "prag/tokenizer.hpp"

namespace prag {

Query Query::from_text(std::string text) {
  Query q;
  q.tokens = tokenize(text);
  q.text = std::move(text);
  return q;
}

std::string entry_text(const ProfileEntry& entry,
                       std::span<const std::string> indexed_fields) {
  std::string out;
  for (const auto& name : indexed_fields) {
    const std::string* value = entry.field(name);
    if (value == nullptr || value->empty()) continue;
    if (!out.empty()) out += ' ';
    out += *value;
  }
  return out;
}

ProfileIndex ProfileIndex::build(std::span<const ProfileEntry> profile,
                                 std::span<const std::string> indexed_fields) {
  if (profile.empty()) throw InvalidArgument("empty profile");
  ProfileIndex index;
  index.ids_.reserve(profile.size());
  index.tf_.reserve(profile.size());
  index.lengths_.reserve(profile.size());
  std::size_t total = 0;
  for (const auto& entry : profile) {
    const std::string text = entry_text(entry, indexed_fields);
    if (text.empty()) {
      throw InvalidArgument("profile entry '" + entry.id +
                            "' has no indexed field content");
    }
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t length = 0;
    for (auto& token : tokenize(text)) {
      ++counts[std::move(token)];
      ++length;
    }
    for (const auto& [term, n] : counts) ++index.df_[term];
    index.ids_.push_back(entry.id);
    index.tf_.push_back(std::move(counts));
    index.lengths_.push_back(length);
    total += length;
  }
  index.avgdl_ = static_cast<double>(total) / static_cast<double>(profile.size());
  if (index.avgdl_ <= 0.0) {
    throw InvalidArgument("profile has no indexable tokens");
  }
  return index;
}

std::optional<std::size_t> ProfileIndex::find(std::string_view entry_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == entry_id) return i;
  }
  return std::nullopt;
}

std::size_t ProfileIndex::term_frequency(std::size_t doc,
                                         const std::string& term) const {
  const auto& counts = tf_.at(doc);
  const auto it = counts.find(term);
  return it == counts.end() ? 0 : it->second;
}

std::size_t ProfileIndex::document_frequency(const std::string& term) const {
  const auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double ProfileIndex::idf(const std::string& term) const {
  const auto n = static_cast<double>(size());
  const auto df = static_cast<double>(document_frequency(term));
  return std::log1p((n - df + 0.5) / (df + 0.5));
}

std::vector<std::pair<const std::string*, double>> ProfileIndex::weighted_terms(
    const Query& query) const {
  std::vector<std::pair<const std::string*, double>> terms;
  for (const auto& term : query.tokens) {
    const bool repeated = std::any_of(terms.begin(), terms.end(),
                                      [&](const auto& t) { return *t.first == term; });
    if (repeated || !df_.contains(term)) continue;
    terms.emplace_back(&term, idf(term));
  }
  return terms;
}

double ProfileIndex::score_terms(
    std::span<const std::pair<const std::string*, double>> terms, std::size_t doc,
    const Bm25Params& params) const {
  const double norm = params.k1 * (1.0 - params.b +
                                   params.b * static_cast<double>(length(doc)) /
                                       avgdl_);
  const auto& counts = tf_.at(doc);
  double total = 0.0;
  for (const auto& [term, idf] : terms) {
    const auto it = counts.find(*term);
    if (it == counts.end()) continue;
    const auto tf = static_cast<double>(it->second);
    total += idf * tf * (params.k1 + 1.0) / (tf + norm);
  }
  return total;
}

double ProfileIndex::score(const Query& query, std::size_t doc,
                           const Bm25Params& params) const {
  return score_terms(weighted_terms(query), doc, params);
}

std::vector<double> ProfileIndex::score_all(const Query& query,
                                            const Bm25Params& params) const {
  const auto terms = weighted_terms(query);
  std::vector<double> out(size());
  for (std::size_t doc = 0; doc < size(); ++doc) out[doc] = score_terms(terms, doc, params);
  return out;
}

double bm25_score(const ProfileIndex& index, const Query& query,
                  std::string_view entry_id, const Bm25Params& params) {
  const auto doc = index.find(entry_id);
  if (!doc) {
    throw InvalidArgument("unknown profile entry '" + std::string(entry_id) + "'");
  }
  return index.score(query, *doc, params);
}

}  // namespace prag
