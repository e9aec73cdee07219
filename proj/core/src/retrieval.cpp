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

#include "prag/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "prag/embedding.hpp"
#include "prag/error.hpp"
#include "prag/random.hpp"

namespace prag {

namespace {

void rank_and_truncate(std::vector<ScoredEntry>& scored, std::size_t k) {
  std::sort(scored.begin(), scored.end(),
            [](const ScoredEntry& a, const ScoredEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.entry_id < b.entry_id;
            });
  if (scored.size() > k) scored.resize(k);
}

std::vector<ScoredEntry> score_bm25(const Query& query,
                                    std::span<const ProfileEntry> profile,
                                    const RetrievalOptions& options) {
  const auto index = ProfileIndex::build(profile, options.indexed_fields);
  std::vector<ScoredEntry> out;
  out.reserve(profile.size());
  const auto scores = index.score_all(query, options.bm25);
  for (std::size_t i = 0; i < index.size(); ++i) out.push_back({index.entry_id(i), scores[i]});
  return out;
}

std::vector<ScoredEntry> score_recency(std::span<const ProfileEntry> profile) {
  std::vector<ScoredEntry> out;
  out.reserve(profile.size());
  for (const auto& e : profile) {
    if (!e.date) {
      throw InvalidArgument("recency retrieval: entry '" + e.id + "' has no date");
    }
    out.push_back({e.id, static_cast<double>(*e.date)});
  }
  return out;
}

// A uniform key per entry drawn in id order, so the permutation does not
// depend on the order the profile arrives in.
std::vector<ScoredEntry> score_random(std::span<const ProfileEntry> profile,
                                      const RetrievalOptions& options) {
  std::vector<const ProfileEntry*> by_id;
  by_id.reserve(profile.size());
  for (const auto& e : profile) by_id.push_back(&e);
  std::sort(by_id.begin(), by_id.end(),
            [](const ProfileEntry* a, const ProfileEntry* b) { return a->id < b->id; });
  Rng rng(options.seed, options.salt);
  std::vector<ScoredEntry> out;
  out.reserve(profile.size());
  for (const auto* e : by_id) out.push_back({e->id, rng.uniform()});
  return out;
}

std::vector<ScoredEntry> score_embedding(const Query& query,
                                         std::span<const ProfileEntry> profile,
                                         const RetrievalOptions& options) {
  std::vector<std::string> texts;
  texts.reserve(profile.size() + 1);
  texts.push_back(query.text);
  for (const auto& e : profile) texts.push_back(entry_text(e, options.indexed_fields));
  const auto vectors = options.embedder->embed(texts);
  if (vectors.size() != texts.size()) {
    throw ProtocolError("embedder returned the wrong number of vectors");
  }
  std::vector<ScoredEntry> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out.push_back({profile[i].id, cosine_similarity(vectors[0], vectors[i + 1])});
  }
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kBm25: return "bm25";
    case Strategy::kRecency: return "recency";
    case Strategy::kRandom: return "random";
    case Strategy::kEmbedding: return "embedding";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  for (const auto s : {Strategy::kBm25, Strategy::kRecency, Strategy::kRandom,
                       Strategy::kEmbedding}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown retrieval strategy '" + std::string(name) + "'");
}

std::uint64_t sample_salt(std::string_view sample_id) noexcept {
  return stable_hash(sample_id);
}

RetrievalResult retrieve(const Query& query, std::span<const ProfileEntry> profile,
                         const RetrievalOptions& options) {
  if (options.k == 0) throw InvalidArgument("k must be at least 1");
  if (profile.empty()) throw InvalidArgument("empty profile");
  const bool wants_embedder = options.strategy == Strategy::kEmbedding;
  if (wants_embedder != (options.embedder != nullptr)) {
    throw InvalidArgument(wants_embedder
                              ? "embedding retrieval needs an embedder"
                              : "an embedder is only valid with embedding retrieval");
  }

  std::vector<ScoredEntry> scored;
  switch (options.strategy) {
    case Strategy::kBm25: scored = score_bm25(query, profile, options); break;
    case Strategy::kRecency: scored = score_recency(profile); break;
    case Strategy::kRandom: scored = score_random(profile, options); break;
    case Strategy::kEmbedding: scored = score_embedding(query, profile, options); break;
  }
  rank_and_truncate(scored, options.k);
  return {std::move(scored), options.strategy, options.k};
}

}  // namespace prag
