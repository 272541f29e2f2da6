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

#ifndef THAIFACTUAL_CALIBRATION_HPP_
#define THAIFACTUAL_CALIBRATION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thaifactual/counterfactual.hpp"
#include "thaifactual/predictor.hpp"

namespace thaifactual {

// The calibration layer re-scores a frozen predictor's outputs from signals
// the predictor itself cannot fake: agreement across matched counterfactual
// variants, the annotated sentiment, and the rationale. The base model is
// never touched. A small multinomial re-scorer is fitted on gold stances of
// original examples only; counterfactual variants enter through features,
// never as labeled rows.

inline constexpr int kFeatureDim = 14;

// Fixed feature order. Model files carry this manifest and loading refuses
// a model whose manifest disagrees with the current definition.
const std::array<std::string, kFeatureDim>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureDim> values = {};
};

// Word-polarity lexicon for the rationale_polarity feature. User-supplied;
// when absent the feature is fixed at 0 and reports flag it.
class PolarityLexicon {
 public:
  static PolarityLexicon load(const std::string& path);
  static PolarityLexicon from_entries(
      std::vector<std::pair<std::string, double>> entries);

  // Mean weight of non-overlapping matches (longest first) in `text`,
  // clamped to [-1, 1]; 0 when nothing matches.
  double score(std::string_view text) const;

  bool empty() const { return entries_.empty(); }

 private:
  // Sorted by descending grapheme length for longest-match-first scanning.
  std::vector<std::pair<std::string, double>> entries_;
};

struct FeatureConfig {
  std::optional<PolarityLexicon> polarity;
};

// Builds the feature vector for one original example from its counterfactual
// set and the predictions covering the original and every variant. A missing
// prediction is a hard error; a present-but-failed variant prediction is
// excluded from the consistency pool.
FeatureVector extract_features(const CounterfactualSet& set,
                               const PredictionSet& preds,
                               const std::vector<EntityEntry>& lexicon,
                               const FeatureConfig& config);

using WeightMatrix = std::array<std::array<double, kFeatureDim>, 3>;

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;  // stop when the loss delta drops below this

  void validate() const;
};

struct TrainingMeta {
  int epochs_run = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

struct CalibratorModel {
  WeightMatrix weights = {};
  double tau = 0.75;  // consensus threshold for the rule fallback
  TrainingMeta meta;

  void save(const std::string& path) const;
  static CalibratorModel load(const std::string& path);
};

using TrainingRow = std::pair<FeatureVector, StanceLabel>;

// Mean cross-entropy of softmax(W f) against gold plus (l2/2)||W||^2, with
// the exact analytic gradient. W = 0 gives ln 3 on any batch.
std::pair<double, WeightMatrix> loss_and_gradient(
    const WeightMatrix& weights, std::span<const TrainingRow> batch,
    double l2);

// Full-batch gradient descent, deterministic given the config. Requires at
// least one row per stance class. Aborts with a diagnostic if the loss
// diverges (decrease the learning rate); the recorded final loss never
// exceeds the initial loss.
CalibratorModel fit_calibrator(std::span<const TrainingRow> rows,
                               const TrainConfig& config);

// softmax(W f) as a prediction record tagged backend "thaifactual". Ties in
// the argmax break support < against < neutral.
PredictionRecord calibrate(const CounterfactualSet& set,
                           const PredictionSet& preds,
                           const CalibratorModel& model,
                           const std::vector<EntityEntry>& lexicon,
                           const FeatureConfig& config);

// Deterministic rule used when no fitted model is supplied: if at least a
// tau fraction of the argmaxes over {original, variants} agree, emit that
// label, otherwise neutral.
PredictionRecord consensus_fallback(const CounterfactualSet& set,
                                    const PredictionSet& preds, double tau);

// Rows for fitting: one per original example with a usable (non-failed)
// base prediction. Variant stances are unverified and never become rows.
std::vector<TrainingRow> build_training_rows(
    std::span<const CounterfactualSet> sets, const PredictionSet& preds,
    const std::vector<EntityEntry>& lexicon, const FeatureConfig& config);

// Calibrates every set; with a null model the consensus fallback at `tau`
// is used. Originals whose base prediction failed stay failed.
PredictionSet calibrate_batch(std::span<const CounterfactualSet> sets,
                              const PredictionSet& preds,
                              const CalibratorModel* model, double tau,
                              const std::vector<EntityEntry>& lexicon,
                              const FeatureConfig& config);

}  // namespace thaifactual

#endif  // THAIFACTUAL_CALIBRATION_HPP_
