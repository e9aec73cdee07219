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

#include "prag/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "prag/error.hpp"
#include "prag/tokenizer.hpp"

namespace prag {

namespace {

template <typename A, typename B>
void require_same_nonempty(std::span<A> a, std::span<B> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("prediction/gold length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw InvalidArgument("no predictions to score");
}

PrfScore prf(std::size_t hits, std::size_t cand, std::size_t ref) {
  if (cand == 0 || ref == 0 || hits == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(cand);
  const double r = static_cast<double>(hits) / static_cast<double>(ref);
  return {p, r, 2.0 * p * r / (p + r)};
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  // nlohmann's shortest round-trip form, reused so CSV and JSON agree.
  return nlohmann::json(v).dump();
}

}  // namespace

double accuracy(std::span<const std::string> preds, std::span<const std::string> golds) {
  require_same_nonempty(preds, golds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                std::span<const std::string> labels) {
  require_same_nonempty(preds, golds);
  if (labels.empty()) throw InvalidArgument("empty label set");
  double total = 0.0;
  for (const auto& label : labels) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool p = preds[i] == label;
      const bool g = golds[i] == label;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    if (tp == 0) continue;  // precision + recall = 0
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    total += 2.0 * precision * recall / (precision + recall);
  }
  return total / static_cast<double>(labels.size());
}

double mae(std::span<const double> preds, std::span<const double> golds) {
  require_same_nonempty(preds, golds);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - golds[i]);
  return sum / static_cast<double>(preds.size());
}

double rmse(std::span<const double> preds, std::span<const double> golds) {
  require_same_nonempty(preds, golds);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - golds[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(preds.size()));
}

int parse_ordinal(std::string_view label) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (label.empty() || ec != std::errc() || ptr != label.data() + label.size()) {
    throw InvalidArgument("unparsable ordinal label '" + std::string(label) + "'");
  }
  return value;
}

PrfScore rouge1(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  std::unordered_map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::size_t hits = 0;
  for (const auto& t : cand) {
    const auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++hits;
    }
  }
  return prf(hits, cand.size(), ref.size());
}

PrfScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  std::vector<std::size_t> prev(ref.size() + 1, 0);
  std::vector<std::size_t> cur(ref.size() + 1, 0);
  for (const auto& c : cand) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      cur[j + 1] = c == ref[j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  return prf(prev[ref.size()], cand.size(), ref.size());
}

double rouge1_similarity(std::string_view label, std::string_view generated) {
  return rouge1(generated, label).f1;
}

LabelMapping map_to_label(std::string_view generated, std::span<const std::string> labels,
                          const LabelSimilarity& similarity) {
  if (labels.empty()) throw InvalidArgument("empty label set");
  const std::string_view trimmed = trim(generated);
  for (const auto& label : labels) {
    if (label == trimmed) return {label, false};
  }
  std::size_t best = 0;
  double best_score = similarity(labels[0], generated);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const double s = similarity(labels[i], generated);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return {labels[best], true};
}

MetricReport evaluate_run(const TaskSpec& task, std::span<const PredictionRecord> records,
                          const LabelSimilarity& similarity) {
  if (records.empty()) throw InvalidArgument("no records to evaluate");
  MetricReport report;
  report.task_id = task.task_id;
  report.n = records.size();
  report.per_sample.reserve(records.size());

  if (!task.is_classification()) {
    double r1 = 0.0;
    double rl = 0.0;
    for (const auto& rec : records) {
      SampleScore s{rec.sample_id, rec.prediction, rec.prediction, rec.gold, false, {}};
      s.scores["rouge1"] = rouge1(rec.prediction, rec.gold).f1;
      s.scores["rougeL"] = rouge_l(rec.prediction, rec.gold).f1;
      r1 += s.scores["rouge1"];
      rl += s.scores["rougeL"];
      report.per_sample.push_back(std::move(s));
    }
    const auto n = static_cast<double>(records.size());
    report.metrics["rouge1"] = r1 / n;
    report.metrics["rougeL"] = rl / n;
    return report;
  }

  std::vector<std::string> preds;
  std::vector<std::string> golds;
  std::size_t mapped = 0;
  for (const auto& rec : records) {
    auto m = map_to_label(rec.prediction, task.labels, similarity);
    mapped += m.mapped ? 1 : 0;
    SampleScore s{rec.sample_id, rec.prediction, m.label, rec.gold, m.mapped, {}};
    s.scores["correct"] = m.label == rec.gold ? 1.0 : 0.0;
    preds.push_back(m.label);
    golds.push_back(rec.gold);
    report.per_sample.push_back(std::move(s));
  }
  report.mapped_fraction = static_cast<double>(mapped) / static_cast<double>(records.size());
  report.metrics["accuracy"] = accuracy(preds, golds);

  if (task.kind == TaskKind::kCategoricalClassification) {
    report.metrics["f1"] = macro_f1(preds, golds, task.labels);
  }
  if (task.kind == TaskKind::kOrdinalClassification) {
    std::vector<double> p;
    std::vector<double> g;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      p.push_back(parse_ordinal(preds[i]));
      g.push_back(parse_ordinal(golds[i]));
      const double d = p.back() - g.back();
      report.per_sample[i].scores["abs_error"] = std::abs(d);
      report.per_sample[i].scores["squared_error"] = d * d;
    }
    report.metrics["mae"] = mae(p, g);
    report.metrics["rmse"] = rmse(p, g);
  }
  return report;
}

std::string dump_report(const MetricReport& report) {
  nlohmann::json j;
  j["task"] = report.task_id;
  j["n"] = report.n;
  j["n_failed"] = report.n_failed;
  j["failed_sample_ids"] = report.failed_sample_ids;
  j["metrics"] = report.metrics;
  j["mapped_fraction"] = report.mapped_fraction;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : report.per_sample) {
    rows.push_back({{"sample_id", s.sample_id},
                    {"prediction_raw", s.prediction_raw},
                    {"prediction_mapped", s.prediction_mapped},
                    {"gold", s.gold},
                    {"mapped", s.mapped},
                    {"scores", s.scores}});
  }
  j["per_sample"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string per_sample_csv(const MetricReport& report) {
  std::vector<std::string> score_names;
  for (const auto& s : report.per_sample) {
    for (const auto& [name, v] : s.scores) {
      if (std::find(score_names.begin(), score_names.end(), name) == score_names.end()) {
        score_names.push_back(name);
      }
    }
  }
  std::sort(score_names.begin(), score_names.end());
  std::string out = "sample_id,prediction_raw,prediction_mapped,gold,mapped";
  for (const auto& name : score_names) out += "," + name;
  out += "\n";
  for (const auto& s : report.per_sample) {
    out += csv_field(s.sample_id) + "," + csv_field(s.prediction_raw) + "," +
           csv_field(s.prediction_mapped) + "," + csv_field(s.gold) + "," +
           (s.mapped ? "1" : "0");
    for (const auto& name : score_names) {
      const auto it = s.scores.find(name);
      out += ",";
      if (it != s.scores.end()) out += format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

}  // namespace prag
