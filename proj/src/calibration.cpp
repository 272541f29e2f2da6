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

#include "thaifactual/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/unicode.hpp"

namespace thaifactual {

using detail::Json;
using detail::OrderedJson;

const std::array<std::string, kFeatureDim>& feature_names() {
  static const std::array<std::string, kFeatureDim> kNames = {
      "base_support",
      "base_against",
      "base_neutral",
      "sentiment_positive",
      "sentiment_negative",
      "sentiment_neutral",
      "sentiment_alignment",
      "cf_flip_rate",
      "cf_hist_support",
      "cf_hist_against",
      "cf_hist_neutral",
      "rationale_mentions_target",
      "rationale_polarity",
      "bias_constant",
  };
  return kNames;
}

PolarityLexicon PolarityLexicon::load(const std::string& path) {
  Json doc = detail::load_json_file(path);
  if (!doc.is_object()) {
    throw ParseError(path + ": polarity lexicon must be an object of "
                            "token -> weight");
  }
  std::vector<std::pair<std::string, double>> entries;
  for (const auto& [token, weight] : doc.items()) {
    if (!weight.is_number()) {
      throw ParseError(path + ": non-numeric weight for token '" + token +
                       "'");
    }
    entries.emplace_back(uni::nfc(token), weight.get<double>());
  }
  return from_entries(std::move(entries));
}

PolarityLexicon PolarityLexicon::from_entries(
    std::vector<std::pair<std::string, double>> entries) {
  PolarityLexicon lexicon;
  lexicon.entries_ = std::move(entries);
  std::stable_sort(lexicon.entries_.begin(), lexicon.entries_.end(),
                   [](const auto& a, const auto& b) {
                     return uni::grapheme_count(a.first) >
                            uni::grapheme_count(b.first);
                   });
  return lexicon;
}

double PolarityLexicon::score(std::string_view text) const {
  if (entries_.empty() || text.empty()) return 0.0;
  const std::vector<std::size_t> boundaries = uni::grapheme_boundaries(text);
  const auto aligned = [&](std::size_t offset) {
    return std::binary_search(boundaries.begin(), boundaries.end(), offset);
  };
  const std::string folded = uni::ascii_lower(text);
  std::vector<bool> claimed(text.size(), false);

  double sum = 0.0;
  std::size_t matches = 0;
  for (const auto& [token, weight] : entries_) {
    const std::string folded_token = uni::ascii_lower(token);
    std::size_t from = 0;
    while (true) {
      std::size_t pos = folded.find(folded_token, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      std::size_t end = pos + folded_token.size();
      if (!aligned(pos) || !aligned(end)) continue;
      bool overlap = false;
      for (std::size_t b = pos; b < end && !overlap; ++b) {
        overlap = claimed[b];
      }
      if (overlap) continue;
      for (std::size_t b = pos; b < end; ++b) claimed[b] = true;
      sum += weight;
      ++matches;
    }
  }
  if (matches == 0) return 0.0;
  return std::clamp(sum / static_cast<double>(matches), -1.0, 1.0);
}

FeatureVector extract_features(const CounterfactualSet& set,
                               const PredictionSet& preds,
                               const std::vector<EntityEntry>& lexicon,
                               const FeatureConfig& config) {
  const Example& original = set.original;
  const PredictionRecord* base = preds.find(original.id);
  if (base == nullptr) {
    throw ValidationError("missing prediction for original '" + original.id +
                          "'");
  }
  if (base->failed) {
    throw ValidationError("base prediction for '" + original.id +
                          "' is failed; no features can be extracted");
  }

  FeatureVector f;
  auto& v = f.values;
  v[static_cast<int>(base->argmax)] = 1.0;
  v[3 + static_cast<int>(original.sentiment)] = 1.0;
  v[6] = base->argmax == sentiment_mapped_stance(original.sentiment) ? 1.0
                                                                     : 0.0;

  // Consistency pool over {original, variants}; failed variant predictions
  // are excluded, missing ones are an error.
  std::array<double, 3> histogram = {0.0, 0.0, 0.0};
  histogram[static_cast<int>(base->argmax)] += 1.0;
  double pool = 1.0;
  double flips = 0.0;
  double variants_considered = 0.0;
  for (const CounterfactualVariant& variant : set.variants) {
    const PredictionRecord* vp = preds.find(variant.example.id);
    if (vp == nullptr) {
      throw ValidationError("missing prediction for variant '" +
                            variant.example.id + "'");
    }
    if (vp->failed) continue;
    variants_considered += 1.0;
    pool += 1.0;
    histogram[static_cast<int>(vp->argmax)] += 1.0;
    if (vp->argmax != base->argmax) flips += 1.0;
  }
  v[7] = variants_considered > 0.0 ? flips / variants_considered : 0.0;
  for (int i = 0; i < 3; ++i) v[8 + i] = histogram[i] / pool;

  if (original.rationale) {
    // "Mentions the target" means mentions it by name. Pronouns are too
    // weak a signal to count as a mention.
    std::vector<EntitySpan> spans =
        find_entity_spans(*original.rationale, lexicon, original.target_id);
    bool mentions = std::any_of(
        spans.begin(), spans.end(),
        [](const EntitySpan& s) { return s.kind == SpanKind::kAlias; });
    v[11] = mentions ? 1.0 : 0.0;
    if (config.polarity && !config.polarity->empty()) {
      v[12] = config.polarity->score(*original.rationale);
    }
  }
  v[13] = 1.0;

  for (double value : v) {
    if (!std::isfinite(value)) {
      throw ValidationError("non-finite feature for '" + original.id + "'");
    }
  }
  return f;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (l2 < 0.0) {
    throw ConfigError("l2 must be >= 0");
  }
  if (!(tolerance >= 0.0)) {
    throw ConfigError("tolerance must be >= 0");
  }
}

namespace {

std::array<double, 3> softmax_logits(const WeightMatrix& weights,
                                     const FeatureVector& f) {
  std::array<double, 3> logits = {0.0, 0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < kFeatureDim; ++k) {
      logits[c] += weights[c][k] * f.values[k];
    }
  }
  double max_logit = std::max({logits[0], logits[1], logits[2]});
  double denom = 0.0;
  for (int c = 0; c < 3; ++c) {
    logits[c] = std::exp(logits[c] - max_logit);
    denom += logits[c];
  }
  for (int c = 0; c < 3; ++c) logits[c] /= denom;
  return logits;
}

}  // namespace

std::pair<double, WeightMatrix> loss_and_gradient(
    const WeightMatrix& weights, std::span<const TrainingRow> batch,
    double l2) {
  if (batch.empty()) {
    throw ValidationError("loss_and_gradient: batch is empty");
  }
  WeightMatrix gradient = {};
  double loss = 0.0;
  for (const auto& [features, gold] : batch) {
    for (double value : features.values) {
      if (!std::isfinite(value)) {
        throw ValidationError("loss_and_gradient: non-finite feature");
      }
    }
    std::array<double, 3> p = softmax_logits(weights, features);
    loss += -std::log(std::max(p[static_cast<int>(gold)], 1e-300));
    for (int c = 0; c < 3; ++c) {
      double delta = p[c] - (c == static_cast<int>(gold) ? 1.0 : 0.0);
      for (int k = 0; k < kFeatureDim; ++k) {
        gradient[c][k] += delta * features.values[k];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  loss *= inv_n;
  double penalty = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < kFeatureDim; ++k) {
      gradient[c][k] = gradient[c][k] * inv_n + l2 * weights[c][k];
      penalty += weights[c][k] * weights[c][k];
    }
  }
  loss += 0.5 * l2 * penalty;
  return {loss, gradient};
}

CalibratorModel fit_calibrator(std::span<const TrainingRow> rows,
                               const TrainConfig& config) {
  config.validate();
  std::array<int, 3> class_counts = {0, 0, 0};
  for (const TrainingRow& row : rows) {
    ++class_counts[static_cast<int>(row.second)];
  }
  for (StanceLabel label : kAllStanceLabels) {
    if (class_counts[static_cast<int>(label)] == 0) {
      throw ValidationError(
          "fit set has no examples for stance class '" +
          std::string(to_string(label)) + "'");
    }
  }

  CalibratorModel model;
  model.meta.seed = config.seed;
  WeightMatrix& weights = model.weights;

  auto [initial_loss, initial_gradient] =
      loss_and_gradient(weights, rows, config.l2);
  model.meta.initial_loss = initial_loss;

  double previous_loss = initial_loss;
  WeightMatrix gradient = initial_gradient;
  int epoch = 0;
  for (; epoch < config.epochs; ++epoch) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < kFeatureDim; ++k) {
        weights[c][k] -= config.learning_rate * gradient[c][k];
      }
    }
    auto [loss, next_gradient] = loss_and_gradient(weights, rows, config.l2);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::kRuntime,
                  "training diverged (loss is not finite); decrease the "
                  "learning rate");
    }
    gradient = next_gradient;
    bool converged = std::abs(previous_loss - loss) < config.tolerance;
    previous_loss = loss;
    if (converged) {
      ++epoch;
      break;
    }
  }
  model.meta.epochs_run = epoch;
  model.meta.final_loss = previous_loss;
  if (model.meta.final_loss > model.meta.initial_loss) {
    throw Error(ErrorKind::kRuntime,
                "training ended above its starting loss; decrease the "
                "learning rate");
  }
  return model;
}

namespace {

PredictionRecord record_from_distribution(const CounterfactualSet& set,
                                          const PredictionSet& preds,
                                          std::array<double, 3> distribution,
                                          std::string backend) {
  const PredictionRecord* base = preds.find(set.original.id);
  PredictionRecord record;
  record.example_id = set.original.id;
  record.distribution = distribution;
  record.argmax = distribution_argmax(distribution);
  record.backend = std::move(backend);
  record.prompt_hash = base != nullptr ? base->prompt_hash : "";
  return record;
}

}  // namespace

PredictionRecord calibrate(const CounterfactualSet& set,
                           const PredictionSet& preds,
                           const CalibratorModel& model,
                           const std::vector<EntityEntry>& lexicon,
                           const FeatureConfig& config) {
  FeatureVector features = extract_features(set, preds, lexicon, config);
  std::array<double, 3> distribution =
      softmax_logits(model.weights, features);
  return record_from_distribution(set, preds, distribution, "thaifactual");
}

PredictionRecord consensus_fallback(const CounterfactualSet& set,
                                    const PredictionSet& preds, double tau) {
  if (!(tau > 0.5 && tau <= 1.0)) {
    throw ConfigError("consensus threshold tau must lie in (0.5, 1]");
  }
  std::array<int, 3> counts = {0, 0, 0};
  int pool = 0;
  const auto consider = [&](const PredictionRecord* record) {
    if (record != nullptr && !record->failed) {
      ++counts[static_cast<int>(record->argmax)];
      ++pool;
    }
  };
  const PredictionRecord* base = preds.find(set.original.id);
  if (base == nullptr) {
    throw ValidationError("missing prediction for original '" +
                          set.original.id + "'");
  }
  consider(base);
  for (const CounterfactualVariant& variant : set.variants) {
    const PredictionRecord* vp = preds.find(variant.example.id);
    if (vp == nullptr) {
      throw ValidationError("missing prediction for variant '" +
                            variant.example.id + "'");
    }
    consider(vp);
  }
  if (pool == 0) {
    PredictionRecord record;
    record.example_id = set.original.id;
    record.backend = "thaifactual-fallback";
    record.failed = true;
    record.error = "no usable predictions in the counterfactual set";
    return record;
  }

  StanceLabel winner = StanceLabel::kSupport;
  int best = -1;
  for (StanceLabel label : kAllStanceLabels) {
    int count = counts[static_cast<int>(label)];
    if (count > best) {
      best = count;
      winner = label;
    }
  }
  StanceLabel verdict =
      static_cast<double>(best) / static_cast<double>(pool) >= tau
          ? winner
          : StanceLabel::kNeutral;
  std::array<double, 3> one_hot = {0.0, 0.0, 0.0};
  one_hot[static_cast<int>(verdict)] = 1.0;
  return record_from_distribution(set, preds, one_hot,
                                  "thaifactual-fallback");
}

std::vector<TrainingRow> build_training_rows(
    std::span<const CounterfactualSet> sets, const PredictionSet& preds,
    const std::vector<EntityEntry>& lexicon, const FeatureConfig& config) {
  std::vector<TrainingRow> rows;
  rows.reserve(sets.size());
  for (const CounterfactualSet& set : sets) {
    const PredictionRecord* base = preds.find(set.original.id);
    if (base == nullptr) {
      throw ValidationError("missing prediction for original '" +
                            set.original.id + "'");
    }
    if (base->failed) continue;  // nothing to re-score
    rows.emplace_back(extract_features(set, preds, lexicon, config),
                      set.original.stance);
  }
  return rows;
}

PredictionSet calibrate_batch(std::span<const CounterfactualSet> sets,
                              const PredictionSet& preds,
                              const CalibratorModel* model, double tau,
                              const std::vector<EntityEntry>& lexicon,
                              const FeatureConfig& config) {
  PredictionSet out;
  for (const CounterfactualSet& set : sets) {
    const PredictionRecord* base = preds.find(set.original.id);
    if (base == nullptr) {
      throw ValidationError("missing prediction for original '" +
                            set.original.id + "'");
    }
    if (base->failed) {
      PredictionRecord record = *base;
      record.backend = model != nullptr ? "thaifactual" : "thaifactual-fallback";
      out.add(std::move(record));
      continue;
    }
    out.add(model != nullptr
                ? calibrate(set, preds, *model, lexicon, config)
                : consensus_fallback(set, preds, tau));
  }
  return out;
}

void CalibratorModel::save(const std::string& path) const {
  OrderedJson doc;
  doc["format"] = "thaifactual-calibrator";
  doc["version"] = 1;
  doc["feature_names"] = feature_names();
  doc["weights"] = weights;
  doc["tau"] = tau;
  doc["training"] = {{"epochs_run", meta.epochs_run},
                     {"initial_loss", meta.initial_loss},
                     {"final_loss", meta.final_loss},
                     {"seed", meta.seed}};
  std::ofstream out = detail::open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

CalibratorModel CalibratorModel::load(const std::string& path) {
  Json doc = detail::load_json_file(path);
  if (doc.value("format", std::string()) != "thaifactual-calibrator" ||
      doc.value("version", 0) != 1) {
    throw ConfigError(path + ": not a calibrator model file");
  }
  // The manifest must match the current feature definition exactly;
  // otherwise the weights would silently bind to the wrong features.
  const auto& expected = feature_names();
  const Json& manifest = doc.at("feature_names");
  if (!manifest.is_array() || manifest.size() != expected.size()) {
    throw ConfigError(path + ": feature manifest mismatch");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (manifest[i].get<std::string>() != expected[i]) {
      throw ConfigError(path + ": feature manifest mismatch at position " +
                        std::to_string(i) + " ('" +
                        manifest[i].get<std::string>() + "' vs '" +
                        expected[i] + "')");
    }
  }
  CalibratorModel model;
  const Json& weights = doc.at("weights");
  if (!weights.is_array() || weights.size() != 3) {
    throw ConfigError(path + ": weights must be 3 rows");
  }
  for (int c = 0; c < 3; ++c) {
    if (!weights[c].is_array() || weights[c].size() != kFeatureDim) {
      throw ConfigError(path + ": weight row " + std::to_string(c) +
                        " must have " + std::to_string(kFeatureDim) +
                        " entries");
    }
    for (int k = 0; k < kFeatureDim; ++k) {
      model.weights[c][k] = weights[c][k].get<double>();
      if (!std::isfinite(model.weights[c][k])) {
        throw ConfigError(path + ": non-finite weight");
      }
    }
  }
  model.tau = doc.value("tau", 0.75);
  if (!(model.tau > 0.5 && model.tau <= 1.0)) {
    throw ConfigError(path + ": tau must lie in (0.5, 1]");
  }
  if (doc.contains("training")) {
    const Json& training = doc["training"];
    model.meta.epochs_run = training.value("epochs_run", 0);
    model.meta.initial_loss = training.value("initial_loss", 0.0);
    model.meta.final_loss = training.value("final_loss", 0.0);
    model.meta.seed = training.value("seed", std::uint64_t{0});
  }
  return model;
}

}  // namespace thaifactual
