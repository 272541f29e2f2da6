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

#ifndef THAIFACTUAL_METRICS_HPP_
#define THAIFACTUAL_METRICS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thaifactual/calibration.hpp"
#include "thaifactual/corpus.hpp"
#include "thaifactual/predictor.hpp"

namespace thaifactual {

// 3x3 confusion indexed [gold][predicted]. Failed predictions are counted
// separately and never enter the matrix: silently folding failures into
// "neutral" would fabricate bias.
struct ConfusionCounts {
  std::array<std::array<std::int64_t, 3>, 3> matrix = {};
  std::int64_t failed_count = 0;

  std::int64_t gold_count(int gold) const {
    return matrix[gold][0] + matrix[gold][1] + matrix[gold][2];
  }
  std::int64_t predicted_count(int predicted) const {
    return matrix[0][predicted] + matrix[1][predicted] + matrix[2][predicted];
  }
  std::int64_t scored() const {
    return gold_count(0) + gold_count(1) + gold_count(2);
  }
};

// Tabulates gold stances against prediction argmaxes, aligned by example
// id. Every example must have a prediction record; extra records (e.g. for
// counterfactual variants) are ignored.
ConfusionCounts confusion_counts(std::span<const Example> examples,
                                 const PredictionSet& preds);

// Population standard deviation of the three per-class recalls, on the
// fraction scale, times 100. Zero iff all recalls are equal. A class with
// no gold examples has no recall; that raises UndefinedMetricError naming
// the class rather than imputing a value.
double rstd(const ConfusionCounts& counts);

// Mean over classes of 2PR/(P+R), times 100, computed as 2TP/(2TP+FP+FN)
// from integer counts. A class absent from both gold and predictions is
// undefined; with skip_empty_classes the mean runs over the remaining
// classes instead (callers should surface the flag).
double macro_f1(const ConfusionCounts& counts,
                bool skip_empty_classes = false);

// Fraction (x100) of scored predictions that align with sentiment polarity:
// positive->support or negative->against. Neutral-sentiment examples stay
// in the denominator (they can only contribute 0) unless
// exclude_neutral_sentiment is set.
double bias_ssc(std::span<const Example> examples, const PredictionSet& preds,
                bool exclude_neutral_sentiment = false);

struct EntityMetrics {
  std::optional<double> bias_ssc;
  std::optional<double> rstd;
  std::optional<double> macro_f1;
  std::int64_t n_scored = 0;
  std::int64_t n_failed = 0;
};

struct EvaluateOptions {
  bool skip_empty_classes = false;
  bool exclude_neutral_sentiment = false;
  std::size_t tolerance = 0;  // reserved for balance reporting
};

struct MetricReport {
  double bias_ssc = 0.0;
  double rstd = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> ood_macro_f1;
  std::map<std::string, double> ood_per_entity;
  std::map<std::string, EntityMetrics> per_entity;
  std::int64_t n_scored = 0;
  std::int64_t n_failed = 0;
  bool skip_empty_classes = false;
  bool exclude_neutral_sentiment = false;
  bool polarity_lexicon_missing = false;
};

// Headline metrics over the original-provenance slice of `corpus` (variant
// stances are unverified and never scored as gold), with a per-entity
// breakdown. Slice metrics that are undefined (say, a class missing from a
// small slice) are reported as absent, not guessed.
MetricReport evaluate(const Corpus& corpus, const PredictionSet& preds,
                      const EvaluateOptions& options = {});

std::string metric_report_json(const MetricReport& report);
MetricReport metric_report_from_json(const std::string& text);

// Per-fold calibration settings for the leave-one-entity-out protocol.
struct OodCalibration {
  enum class Mode { kNone, kConsensus, kFitted } mode = Mode::kNone;
  double tau = 0.75;
  TrainConfig train;
  const FeatureConfig* features = nullptr;  // borrowed; may be null
};

struct OodResult {
  std::map<std::string, double> per_entity_macro_f1;
  double mean = 0.0;
};

// For each entity E: fit the calibrator (if requested) on the originals of
// corpus \ E, then score macro-F1 on E's slice. The fit and eval id sets
// are asserted disjoint in every fold; no held-out example or its gold
// label ever reaches the fitting step.
OodResult ood_evaluate(const Corpus& augmented, const PredictionSet& preds,
                       const OodCalibration& calibration,
                       const EvaluateOptions& options = {});

}  // namespace thaifactual

#endif  // THAIFACTUAL_METRICS_HPP_
