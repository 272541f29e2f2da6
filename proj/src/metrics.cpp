//
// Copyright 2026 The ThaiFACTUAL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "thaifactual/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.hpp"
#include "thaifactual/error.hpp"

namespace thaifactual {

using detail::Json;
using detail::OrderedJson;

ConfusionCounts confusion_counts(std::span<const Example> examples,
                                 const PredictionSet& preds) {
  ConfusionCounts counts;
  for (const Example& ex : examples) {
    const PredictionRecord* record = preds.find(ex.id);
    if (record == nullptr) {
      throw ValidationError("no prediction for example '" + ex.id + "'");
    }
    if (record->failed) {
      ++counts.failed_count;
      continue;
    }
    ++counts.matrix[static_cast<int>(ex.stance)]
                   [static_cast<int>(record->argmax)];
  }
  return counts;
}

double rstd(const ConfusionCounts& counts) {
  std::array<double, 3> recalls;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t gold = counts.gold_count(i);
    if (gold == 0) {
      throw UndefinedMetricError(
          "undefined recall: class '" +
          std::string(to_string(static_cast<StanceLabel>(i))) +
          "' has no gold examples");
    }
    recalls[i] = static_cast<double>(counts.matrix[i][i]) /
                 static_cast<double>(gold);
  }
  const double mean = (recalls[0] + recalls[1] + recalls[2]) / 3.0;
  const double variance = ((recalls[0] - mean) * (recalls[0] - mean) +
                           (recalls[1] - mean) * (recalls[1] - mean) +
                           (recalls[2] - mean) * (recalls[2] - mean)) /
                          3.0;
  return std::sqrt(variance) * 100.0;
}

double macro_f1(const ConfusionCounts& counts, bool skip_empty_classes) {
  double sum = 0.0;
  int defined = 0;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t tp = counts.matrix[i][i];
    const std::int64_t fn = counts.gold_count(i) - tp;
    const std::int64_t fp = counts.predicted_count(i) - tp;
    if (tp == 0 && fp == 0 && fn == 0) {
      if (skip_empty_classes) continue;
      throw UndefinedMetricError(
          "undefined class: '" +
          std::string(to_string(static_cast<StanceLabel>(i))) +
          "' appears in neither gold nor predictions (use "
          "skip-empty-classes to average over the rest)");
    }
    sum += static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
    ++defined;
  }
  if (defined == 0) {
    throw UndefinedMetricError("undefined macro-F1: no scored classes");
  }
  return sum / static_cast<double>(defined) * 100.0;
}

double bias_ssc(std::span<const Example> examples, const PredictionSet& preds,
                bool exclude_neutral_sentiment) {
  std::int64_t scored = 0;
  std::int64_t aligned = 0;
  for (const Example& ex : examples) {
    const PredictionRecord* record = preds.find(ex.id);
    if (record == nullptr) {
      throw ValidationError("no prediction for example '" + ex.id + "'");
    }
    if (record->failed) continue;
    if (exclude_neutral_sentiment &&
        ex.sentiment == SentimentLabel::kNeutral) {
      continue;
    }
    ++scored;
    if (sentiment_aligned(ex.sentiment, record->argmax)) ++aligned;
  }
  if (scored == 0) {
    throw UndefinedMetricError(
        "undefined Bias-SSC: no scored examples in the denominator");
  }
  return 100.0 * static_cast<double>(aligned) / static_cast<double>(scored);
}

namespace {

std::vector<Example> original_slice(const Corpus& corpus) {
  std::vector<Example> originals;
  for (const Example& ex : corpus.examples()) {
    if (ex.provenance == Provenance::kOriginal) originals.push_back(ex);
  }
  return originals;
}

EntityMetrics entity_metrics(std::span<const Example> slice,
                             const PredictionSet& preds,
                             const EvaluateOptions& options) {
  EntityMetrics metrics;
  ConfusionCounts counts = confusion_counts(slice, preds);
  metrics.n_scored = counts.scored();
  metrics.n_failed = counts.failed_count;
  try {
    metrics.rstd = rstd(counts);
  } catch (const UndefinedMetricError&) {
  }
  try {
    metrics.macro_f1 = macro_f1(counts, options.skip_empty_classes);
  } catch (const UndefinedMetricError&) {
  }
  try {
    metrics.bias_ssc =
        bias_ssc(slice, preds, options.exclude_neutral_sentiment);
  } catch (const UndefinedMetricError&) {
  }
  return metrics;
}

}  // namespace

MetricReport evaluate(const Corpus& corpus, const PredictionSet& preds,
                      const EvaluateOptions& options) {
  const std::vector<Example> originals = original_slice(corpus);

  MetricReport report;
  report.skip_empty_classes = options.skip_empty_classes;
  report.exclude_neutral_sentiment = options.exclude_neutral_sentiment;

  ConfusionCounts counts = confusion_counts(originals, preds);
  report.n_scored = counts.scored();
  report.n_failed = counts.failed_count;
  report.rstd = rstd(counts);
  report.macro_f1 = macro_f1(counts, options.skip_empty_classes);
  report.bias_ssc =
      bias_ssc(originals, preds, options.exclude_neutral_sentiment);

  for (const EntityEntry& entity : corpus.lexicon()) {
    std::vector<Example> slice;
    for (const Example& ex : originals) {
      if (ex.target_id == entity.entity_id) slice.push_back(ex);
    }
    if (slice.empty()) continue;
    report.per_entity[entity.entity_id] =
        entity_metrics(slice, preds, options);
  }
  return report;
}

std::string metric_report_json(const MetricReport& report) {
  OrderedJson doc;
  doc["bias_ssc"] = report.bias_ssc;
  doc["rstd"] = report.rstd;
  doc["macro_f1"] = report.macro_f1;
  if (report.ood_macro_f1) {
    doc["ood_macro_f1"] = *report.ood_macro_f1;
    OrderedJson folds;
    for (const auto& [entity, value] : report.ood_per_entity) {
      folds[entity] = value;
    }
    doc["ood_per_entity"] = folds;
  }
  doc["n_scored"] = report.n_scored;
  doc["n_failed"] = report.n_failed;
  OrderedJson per_entity;
  for (const auto& [entity, metrics] : report.per_entity) {
    OrderedJson m;
    if (metrics.bias_ssc) m["bias_ssc"] = *metrics.bias_ssc;
    if (metrics.rstd) m["rstd"] = *metrics.rstd;
    if (metrics.macro_f1) m["macro_f1"] = *metrics.macro_f1;
    m["n_scored"] = metrics.n_scored;
    m["n_failed"] = metrics.n_failed;
    per_entity[entity] = m;
  }
  doc["per_entity"] = per_entity;
  OrderedJson flags;
  flags["skip_empty_classes"] = report.skip_empty_classes;
  flags["exclude_neutral_sentiment"] = report.exclude_neutral_sentiment;
  flags["polarity_lexicon_missing"] = report.polarity_lexicon_missing;
  doc["flags"] = flags;
  return doc.dump(2);
}

MetricReport metric_report_from_json(const std::string& text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("malformed metric report JSON");
  }
  MetricReport report;
  report.bias_ssc = doc.at("bias_ssc").get<double>();
  report.rstd = doc.at("rstd").get<double>();
  report.macro_f1 = doc.at("macro_f1").get<double>();
  if (doc.contains("ood_macro_f1")) {
    report.ood_macro_f1 = doc["ood_macro_f1"].get<double>();
    if (doc.contains("ood_per_entity")) {
      for (const auto& [entity, value] : doc["ood_per_entity"].items()) {
        report.ood_per_entity[entity] = value.get<double>();
      }
    }
  }
  report.n_scored = doc.value("n_scored", std::int64_t{0});
  report.n_failed = doc.value("n_failed", std::int64_t{0});
  if (doc.contains("per_entity")) {
    for (const auto& [entity, m] : doc["per_entity"].items()) {
      EntityMetrics metrics;
      if (m.contains("bias_ssc")) metrics.bias_ssc = m["bias_ssc"].get<double>();
      if (m.contains("rstd")) metrics.rstd = m["rstd"].get<double>();
      if (m.contains("macro_f1")) {
        metrics.macro_f1 = m["macro_f1"].get<double>();
      }
      metrics.n_scored = m.value("n_scored", std::int64_t{0});
      metrics.n_failed = m.value("n_failed", std::int64_t{0});
      report.per_entity[entity] = metrics;
    }
  }
  if (doc.contains("flags")) {
    const Json& flags = doc["flags"];
    report.skip_empty_classes = flags.value("skip_empty_classes", false);
    report.exclude_neutral_sentiment =
        flags.value("exclude_neutral_sentiment", false);
    report.polarity_lexicon_missing =
        flags.value("polarity_lexicon_missing", false);
  }
  return report;
}

OodResult ood_evaluate(const Corpus& augmented, const PredictionSet& preds,
                       const OodCalibration& calibration,
                       const EvaluateOptions& options) {
  if (augmented.lexicon().size() < 2) {
    throw ValidationError("OOD protocol requires at least 2 entities");
  }

  const bool needs_sets = calibration.mode != OodCalibration::Mode::kNone;
  std::vector<CounterfactualSet> sets;
  if (needs_sets) sets = group_counterfactual_sets(augmented);

  static const FeatureConfig kNoFeatures;
  const FeatureConfig& features =
      calibration.features != nullptr ? *calibration.features : kNoFeatures;

  OodResult result;
  double sum = 0.0;
  for (const EntityEntry& held_out : augmented.lexicon()) {
    std::vector<Example> eval_slice;
    std::vector<const CounterfactualSet*> fit_sets;
    std::vector<const CounterfactualSet*> eval_sets;
    std::set<std::string> fit_ids, eval_ids;
    for (const Example& ex : augmented.examples()) {
      if (ex.provenance != Provenance::kOriginal) continue;
      if (ex.target_id == held_out.entity_id) {
        eval_slice.push_back(ex);
        eval_ids.insert(ex.id);
      } else {
        fit_ids.insert(ex.id);
      }
    }
    for (const CounterfactualSet& set : sets) {
      (set.original.target_id == held_out.entity_id ? eval_sets : fit_sets)
          .push_back(&set);
    }

    // Leakage guard: a held-out example must never reach the fitting step.
    for (const std::string& id : eval_ids) {
      if (fit_ids.count(id)) {
        throw Error(ErrorKind::kRuntime,
                    "OOD fold leakage: example '" + id +
                        "' is in both fit and eval sets");
      }
    }

    const PredictionSet* scored = &preds;
    PredictionSet calibrated;
    if (calibration.mode == OodCalibration::Mode::kFitted) {
      std::vector<CounterfactualSet> fit_copy, eval_copy;
      for (const CounterfactualSet* s : fit_sets) fit_copy.push_back(*s);
      for (const CounterfactualSet* s : eval_sets) eval_copy.push_back(*s);
      std::vector<TrainingRow> rows = build_training_rows(
          fit_copy, preds, augmented.lexicon(), features);
      CalibratorModel model = fit_calibrator(rows, calibration.train);
      calibrated = calibrate_batch(eval_copy, preds, &model, calibration.tau,
                                   augmented.lexicon(), features);
      scored = &calibrated;
    } else if (calibration.mode == OodCalibration::Mode::kConsensus) {
      std::vector<CounterfactualSet> eval_copy;
      for (const CounterfactualSet* s : eval_sets) eval_copy.push_back(*s);
      calibrated = calibrate_batch(eval_copy, preds, nullptr, calibration.tau,
                                   augmented.lexicon(), features);
      scored = &calibrated;
    }

    ConfusionCounts counts = confusion_counts(eval_slice, *scored);
    double fold_f1 = macro_f1(counts, options.skip_empty_classes);
    result.per_entity_macro_f1[held_out.entity_id] = fold_f1;
    sum += fold_f1;
  }
  result.mean = sum / static_cast<double>(result.per_entity_macro_f1.size());
  return result;
}

}  // namespace thaifactual
