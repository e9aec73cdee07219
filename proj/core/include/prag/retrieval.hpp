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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prag/model.hpp"

namespace prag {

class EmbeddingProvider;

struct Query {
  std::string text;
  std::vector<std::string> tokens;  // tokenize(text)

  static Query from_text(std::string text);
};

/// Text an entry contributes to the index: the non-empty indexed fields,
/// in the given order, joined by single spaces.
std::string entry_text(const ProfileEntry& entry,
                       std::span<const std::string> indexed_fields);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Term statistics over one user's profile. Document frequencies are scoped
/// to this profile only.
class ProfileIndex {
 public:
  /// Throws InvalidArgument for an empty profile or for an entry whose
  /// indexed fields are all missing or empty.
  static ProfileIndex build(std::span<const ProfileEntry> profile,
                            std::span<const std::string> indexed_fields);

  std::size_t size() const noexcept { return ids_.size(); }
  double average_length() const noexcept { return avgdl_; }

  const std::string& entry_id(std::size_t doc) const { return ids_.at(doc); }
  std::optional<std::size_t> find(std::string_view entry_id) const;

  std::size_t length(std::size_t doc) const { return lengths_.at(doc); }
  std::size_t term_frequency(std::size_t doc, const std::string& term) const;
  std::size_t document_frequency(const std::string& term) const;

  /// ln(((N - df + 0.5) / (df + 0.5)) + 1); never negative.
  double idf(const std::string& term) const;

  double score(const Query& query, std::size_t doc,
               const Bm25Params& params = {}) const;

  /// score() of every entry, in index order.
  std::vector<double> score_all(const Query& query, const Bm25Params& params = {}) const;

 private:
  std::vector<std::pair<const std::string*, double>> weighted_terms(const Query& query) const;
  double score_terms(std::span<const std::pair<const std::string*, double>> terms,
                     std::size_t doc, const Bm25Params& params) const;

  std::vector<std::string> ids_;
  std::vector<std::unordered_map<std::string, std::size_t>> tf_;
  std::vector<std::size_t> lengths_;
  std::unordered_map<std::string, std::size_t> df_;
  double avgdl_ = 0.0;
};

/// BM25 of one entry. Throws InvalidArgument for an unknown entry id.
double bm25_score(const ProfileIndex& index, const Query& query,
                  std::string_view entry_id, const Bm25Params& params = {});

enum class Strategy { kBm25, kRecency, kRandom, kEmbedding };

std::string_view to_string(Strategy s) noexcept;
Strategy strategy_from_string(std::string_view name);

struct ScoredEntry {
  std::string entry_id;
  double score = 0.0;

  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// Ranked entries: scores non-increasing, ties by entry id ascending,
/// length min(k, |profile|).
struct RetrievalResult {
  std::vector<ScoredEntry> entries;
  Strategy strategy = Strategy::kBm25;
  std::size_t k = 0;
};

struct RetrievalOptions {
  Strategy strategy = Strategy::kBm25;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::uint64_t salt = 0;  // per sample; see sample_salt()
  const EmbeddingProvider* embedder = nullptr;
  Bm25Params bm25;
  std::vector<std::string> indexed_fields;
};

/// Salt for the random strategy derived from the sample id, so selections do
/// not depend on processing order.
std::uint64_t sample_salt(std::string_view sample_id) noexcept;

/// Selects the k most pertinent entries of `profile` for `query`.
///
/// Throws InvalidArgument when k is 0, the profile is empty, the embedder
/// is missing (or present for another strategy), or a recency ranking meets
/// an undated entry; embedding ranking also rejects zero-norm vectors.
RetrievalResult retrieve(const Query& query,
                         std::span<const ProfileEntry> profile,
                         const RetrievalOptions& options);

}  // namespace prag
