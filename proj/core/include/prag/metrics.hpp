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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prag/task.hpp"

namespace prag {

double accuracy(std::span<const std::string> preds, std::span<const std::string> golds);

/// Unweighted mean of per-label F1 over `labels`. A label with
/// precision + recall = 0 (including one absent from both sides) scores 0.
double macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                std::span<const std::string> labels);

double mae(std::span<const double> preds, std::span<const double> golds);
double rmse(std::span<const double> preds, std::span<const double> golds);

/// Strict "1".."5"-style integer parse; throws InvalidArgument otherwise.
int parse_ordinal(std::string_view label);

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Clipped unigram overlap over proxy tokens. Zero when either side is empty.
PrfScore rouge1(std::string_view candidate, std::string_view reference);

/// Longest common subsequence over proxy tokens, beta = 1.
PrfScore rouge_l(std::string_view candidate, std::string_view reference);

/// similarity(label, generated); larger is closer.
using LabelSimilarity = std::function<double(std::string_view, std::string_view)>;

/// Token-level ROUGE-1 F1, the default out-of-label similarity.
double rouge1_similarity(std::string_view label, std::string_view generated);

struct LabelMapping {
  std::string label;
  bool mapped = false;  // false when the output already was a label
};

/// Exact label (after trimming surrounding whitespace) or the most similar
/// label; ties go to the earliest label. `labels` must not be empty.
LabelMapping map_to_label(std::string_view generated, std::span<const std::string> labels,
                          const LabelSimilarity& similarity = rouge1_similarity);

struct PredictionRecord {
  std::string sample_id;
  std::string prediction;
  std::string gold;
};

struct SampleScore {
  std::string sample_id;
  std::string prediction_raw;
  std::string prediction_mapped;  // equals raw for generation tasks
  std::string gold;
  bool mapped = false;
  std::map<std::string, double> scores;
};

/// Aggregate and per-sample evaluation of one run.
struct MetricReport {
  std::string task_id;
  std::size_t n = 0;  // scored samples
  std::size_t n_failed = 0;
  std::vector<std::string> failed_sample_ids;
  std::map<std::string, double> metrics;
  std::vector<SampleScore> per_sample;
  double mapped_fraction = 0.0;
};

/// Classification: maps every prediction onto the label set, then accuracy,
/// plus macro F1 (LaMP-2) or MAE/RMSE (LaMP-3). Generation: mean ROUGE-1 and
/// ROUGE-L F1. Records must be non-empty.
MetricReport evaluate_run(const TaskSpec& task, std::span<const PredictionRecord> records,
                          const LabelSimilarity& similarity = rouge1_similarity);

/// Report as JSON (stable key order, fixed float formatting).
std::string dump_report(const MetricReport& report);

/// One row per sample: sample_id, prediction, mapped, gold, then each score.
std::string per_sample_csv(const MetricReport& report);

}  // namespace prag
