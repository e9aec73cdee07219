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

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace prag {

using Embedding = std::vector<double>;

/// Maps texts to fixed-dimension vectors. Implementations must be
/// deterministic and thread-safe.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;

  /// One vector per input text, each of size dimension().
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) const = 0;
};

/// Bag of proxy tokens hashed into `dimension` buckets. Texts with the same
/// token multiset embed identically.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 1024);

  std::size_t dimension() const override { return dimension_; }
  std::vector<Embedding> embed(std::span<const std::string> texts) const override;

 private:
  std::size_t dimension_;
};

/// Remote embedder. POSTs {"texts": [...]} and expects
/// {"vectors": [[...], ...]} with one row per text.
class HttpEmbedder final : public EmbeddingProvider {
 public:
  HttpEmbedder(std::string url, std::size_t dimension,
               std::chrono::milliseconds timeout = std::chrono::seconds(30));

  std::size_t dimension() const override { return dimension_; }
  std::vector<Embedding> embed(std::span<const std::string> texts) const override;

 private:
  std::string url_;
  std::size_t dimension_;
  std::chrono::milliseconds timeout_;
};

double cosine_similarity(const Embedding& a, const Embedding& b);

}  // namespace prag
