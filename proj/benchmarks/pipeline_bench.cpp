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

#include <benchmark/benchmark.h>

#include "prag/metrics.hpp"
#include "prag/prompting.hpp"
#include "prag/retrieval.hpp"
#include "prag/tokenizer.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace prag;

void BM_Tokenize(benchmark::State& state) {
  Rng rng(1);
  const std::string text = testing::random_text(rng, static_cast<std::size_t>(state.range(0)), 5000);
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(64)->Arg(1024);

void BM_Tokenize_Unicode(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 200; ++i) text += "Größe Ünïcode façade Ελληνικά ";
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize_Unicode);

std::vector<ProfileEntry> text_profile(std::size_t n, std::size_t len) {
  Rng rng(2);
  std::vector<ProfileEntry> p;
  for (std::size_t i = 0; i < n; ++i) {
    ProfileEntry e;
    e.id = "e" + std::to_string(i);
    e.fields["text"] = testing::random_text(rng, len, 2000);
    e.fields["title"] = testing::random_text(rng, 6, 2000);
    p.push_back(std::move(e));
  }
  return p;
}

void BM_RetrieveBm25(benchmark::State& state) {
  const auto profile = text_profile(static_cast<std::size_t>(state.range(0)), 120);
  Rng rng(3);
  const auto query = Query::from_text(testing::random_text(rng, 200, 2000));
  RetrievalOptions o;
  o.k = 4;
  o.indexed_fields = {"text"};
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(query, profile, o));
}
BENCHMARK(BM_RetrieveBm25)->Arg(50)->Arg(500);

void BM_BuildPersonalizedInput(benchmark::State& state) {
  Sample s;
  s.id = "s";
  s.user_id = "u";
  Rng rng(4);
  s.input = "Generate a headline for the following article: " + testing::random_text(rng, 400, 2000);
  s.profile = text_profile(100, 300);
  const auto task = task_by_id("LaMP-4");
  PersonalizationConfig c;
  c.k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_personalized_input(s, task, c));
}
BENCHMARK(BM_BuildPersonalizedInput)->Arg(1)->Arg(8);

void BM_RougeL(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::string a = testing::random_text(rng, n, 50);
  const std::string b = testing::random_text(rng, n, 50);
  for (auto _ : state) benchmark::DoNotOptimize(rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(16)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
