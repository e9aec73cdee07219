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

#include "prag/embedding.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "prag/error.hpp"
#include "prag/random.hpp"
#include "prag/tokenizer.hpp"

namespace prag {

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw InvalidArgument("embedding dimension must be positive");
}

std::vector<Embedding> HashingEmbedder::embed(
    std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    Embedding v(dimension_, 0.0);
    for (const auto& token : tokenize(text)) {
      v[stable_hash(token) % dimension_] += 1.0;
    }
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbedder::HttpEmbedder(std::string url, std::size_t dimension,
                           std::chrono::milliseconds timeout)
    : url_(std::move(url)), dimension_(dimension), timeout_(timeout) {
  if (dimension_ == 0) throw InvalidArgument("embedding dimension must be positive");
}

std::vector<Embedding> HttpEmbedder::embed(std::span<const std::string> texts) const {
  const auto parts = detail::split_url(url_);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  nlohmann::json body = {{"texts", nlohmann::json::array()}};
  for (const auto& t : texts) body["texts"].push_back(t);
  const auto res = client.Post(parts.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("embedding request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("embedding endpoint returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("embedding endpoint returned a non-JSON body");
  }
  const auto it = reply.find("vectors");
  if (it == reply.end() || !it->is_array() || it->size() != texts.size()) {
    throw ProtocolError("embedding reply must hold one vector per text");
  }
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& row : *it) {
    if (!row.is_array() || row.size() != dimension_) {
      throw ProtocolError("embedding reply has a vector of the wrong dimension");
    }
    Embedding v;
    v.reserve(dimension_);
    for (const auto& x : row) {
      if (!x.is_number()) throw ProtocolError("embedding reply has a non-numeric value");
      v.push_back(x.get<double>());
    }
    out.push_back(std::move(v));
  }
  return out;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw InvalidArgument("embedding dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace prag
