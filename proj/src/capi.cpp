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

#include "thaifactual.h"

#include <cstring>
#include <string>

#include "json_util.hpp"
#include "thaifactual/calibration.hpp"
#include "thaifactual/corpus.hpp"
#include "thaifactual/counterfactual.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/metrics.hpp"
#include "thaifactual/pipeline.hpp"
#include "thaifactual/predictor.hpp"
#include "thaifactual/report.hpp"
#include "thaifactual/simulator.hpp"

using namespace thaifactual;

using detail::Json;

struct tf_corpus {
  Corpus value;
};

struct tf_predictions {
  PredictionSet value;
};

struct tf_calibrator {
  CalibratorModel value;
};

namespace {

thread_local std::string g_last_error;

tf_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return TF_ERROR_VALIDATION;
    case ErrorKind::kParse:
      return TF_ERROR_PARSE;
    case ErrorKind::kConfig:
      return TF_ERROR_CONFIG;
    case ErrorKind::kUndefined:
      return TF_ERROR_UNDEFINED;
    case ErrorKind::kIo:
    case ErrorKind::kRuntime:
      return TF_ERROR_RUNTIME;
  }
  return TF_ERROR_RUNTIME;
}

// Runs fn, translating exceptions into status codes + the thread-local
// error message.
template <typename Fn>
tf_status guarded(Fn&& fn) {
  try {
    fn();
    return TF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TF_ERROR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return TF_ERROR_RUNTIME;
  }
}

tf_status require_arg(bool ok, const char* message) {
  if (ok) return TF_OK;
  g_last_error = message;
  return TF_ERROR_CONFIG;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

FeatureConfig feature_config_for(const char* polarity_lexicon_path) {
  FeatureConfig config;
  if (polarity_lexicon_path != nullptr && *polarity_lexicon_path != '\0') {
    config.polarity = PolarityLexicon::load(polarity_lexicon_path);
  }
  return config;
}

}  // namespace

extern "C" {

const char* tf_last_error(void) { return g_last_error.c_str(); }

const char* tf_version(void) { return "0.1.0"; }

void tf_string_free(char* s) { delete[] s; }

tf_status tf_corpus_load(const char* corpus_path, const char* lexicon_path,
                         tf_corpus** out) {
  if (tf_status s = require_arg(corpus_path && lexicon_path && out,
                                "tf_corpus_load: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out = new tf_corpus{load_corpus(corpus_path, lexicon_path)};
  });
}

void tf_corpus_free(tf_corpus* corpus) { delete corpus; }

size_t tf_corpus_size(const tf_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->value.size();
}

size_t tf_corpus_entity_count(const tf_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->value.lexicon().size();
}

tf_status tf_corpus_save(const tf_corpus* corpus, const char* path) {
  if (tf_status s =
          require_arg(corpus && path, "tf_corpus_save: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] { save_corpus(corpus->value, path); });
}

tf_status tf_corpus_balance_report(const tf_corpus* corpus, size_t tolerance,
                                   char** out_json) {
  if (tf_status s = require_arg(corpus && out_json,
                                "tf_corpus_balance_report: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out_json =
        copy_string(balance_report_json(balance_report(corpus->value, tolerance)));
  });
}

tf_status tf_corpus_split(const tf_corpus* corpus, const char* held_out,
                          tf_corpus** out_fit, tf_corpus** out_eval) {
  if (tf_status s = require_arg(corpus && held_out && out_fit && out_eval,
                                "tf_corpus_split: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    auto [fit, eval] = leave_one_entity_out_split(corpus->value, held_out);
    *out_fit = new tf_corpus{std::move(fit)};
    *out_eval = new tf_corpus{std::move(eval)};
  });
}

tf_status tf_fleiss_kappa_file(const char* annotations_path, double* out) {
  if (tf_status s = require_arg(annotations_path && out,
                                "tf_fleiss_kappa_file: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out = fleiss_kappa(load_annotations(annotations_path));
  });
}

tf_status tf_generate_counterfactuals(const tf_corpus* corpus,
                                      tf_corpus** out_augmented) {
  if (tf_status s =
          require_arg(corpus && out_augmented,
                      "tf_generate_counterfactuals: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out_augmented = new tf_corpus{generate_augmented_corpus(corpus->value)};
  });
}

tf_status tf_predictions_load(const char* path, tf_predictions** out) {
  if (tf_status s =
          require_arg(path && out, "tf_predictions_load: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out = new tf_predictions{PredictionSet::load(path)};
  });
}

tf_status tf_predictions_save(const tf_predictions* predictions,
                              const char* path) {
  if (tf_status s = require_arg(predictions && path,
                                "tf_predictions_save: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] { predictions->value.save(path); });
}

void tf_predictions_free(tf_predictions* predictions) { delete predictions; }

size_t tf_predictions_size(const tf_predictions* predictions) {
  return predictions == nullptr ? 0 : predictions->value.size();
}

tf_status tf_predictions_merge(const tf_predictions* a,
                               const tf_predictions* b,
                               tf_predictions** out) {
  if (tf_status s =
          require_arg(a && b && out, "tf_predictions_merge: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    PredictionSet merged;
    for (const PredictionRecord& record : a->value.records()) {
      merged.add(record);
    }
    for (const PredictionRecord& record : b->value.records()) {
      merged.add(record);
    }
    *out = new tf_predictions{std::move(merged)};
  });
}

tf_status tf_simulate(const tf_corpus* corpus, const char* config_json,
                      tf_predictions** out) {
  if (tf_status s = require_arg(corpus && config_json && out,
                                "tf_simulate: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    SimulatorConfig config = parse_simulator_config(config_json);
    *out = new tf_predictions{simulate_batch(corpus->value, config)};
  });
}

tf_status tf_predict(const tf_corpus* corpus, const char* config_json,
                     const char* prompt_name, const char* prompt_path,
                     tf_predictions** out) {
  if (tf_status s = require_arg(corpus && config_json && out,
                                "tf_predict: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    PredictorConfig config = parse_predictor_config(config_json);
    PredictionSet set;
    if (config.backend == "replay") {
      PredictionSet replay = PredictionSet::load(config.replay_path);
      for (PredictionRecord& record :
           replay_batch(corpus->value.examples(), replay)) {
        set.add(std::move(record));
      }
    } else if (config.backend == "chat") {
      if (prompt_path == nullptr || *prompt_path == '\0') {
        throw ConfigError("tf_predict: chat backend needs a prompt path");
      }
      PromptTemplate tpl = load_prompt_template(
          prompt_name && *prompt_name ? prompt_name : "raw", prompt_path);
      ResponseCache cache = config.cache_path.empty()
                                ? ResponseCache()
                                : ResponseCache(config.cache_path);
      std::unique_ptr<StanceBackend> backend = make_chat_backend(config);
      for (PredictionRecord& record :
           predict_batch(*backend, corpus->value.examples(),
                         corpus->value.lexicon(), tpl, config, cache)) {
        set.add(std::move(record));
      }
    } else {
      throw ConfigError("tf_predict: use tf_simulate for the simulator");
    }
    *out = new tf_predictions{std::move(set)};
  });
}

tf_status tf_fit_calibrator(const tf_corpus* augmented,
                            const tf_predictions* predictions,
                            const char* train_json,
                            const char* polarity_lexicon_path,
                            tf_calibrator** out) {
  if (tf_status s = require_arg(augmented && predictions && out,
                                "tf_fit_calibrator: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    TrainConfig train = train_json != nullptr && *train_json != '\0'
                            ? parse_train_config(train_json)
                            : TrainConfig{};
    FeatureConfig features = feature_config_for(polarity_lexicon_path);
    std::vector<CounterfactualSet> sets =
        group_counterfactual_sets(augmented->value);
    std::vector<TrainingRow> rows = build_training_rows(
        sets, predictions->value, augmented->value.lexicon(), features);
    *out = new tf_calibrator{fit_calibrator(rows, train)};
  });
}

tf_status tf_calibrator_save(const tf_calibrator* model, const char* path) {
  if (tf_status s =
          require_arg(model && path, "tf_calibrator_save: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] { model->value.save(path); });
}

tf_status tf_calibrator_load(const char* path, tf_calibrator** out) {
  if (tf_status s =
          require_arg(path && out, "tf_calibrator_load: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    *out = new tf_calibrator{CalibratorModel::load(path)};
  });
}

void tf_calibrator_free(tf_calibrator* model) { delete model; }

tf_status tf_calibrate(const tf_corpus* augmented,
                       const tf_predictions* predictions,
                       const tf_calibrator* model_or_null, double tau,
                       const char* polarity_lexicon_path,
                       tf_predictions** out) {
  if (tf_status s = require_arg(augmented && predictions && out,
                                "tf_calibrate: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    FeatureConfig features = feature_config_for(polarity_lexicon_path);
    std::vector<CounterfactualSet> sets =
        group_counterfactual_sets(augmented->value);
    const CalibratorModel* model =
        model_or_null != nullptr ? &model_or_null->value : nullptr;
    *out = new tf_predictions{calibrate_batch(sets, predictions->value, model,
                                              tau, augmented->value.lexicon(),
                                              features)};
  });
}

tf_status tf_evaluate(const tf_corpus* corpus,
                      const tf_predictions* predictions,
                      const char* options_json, char** out_report_json) {
  if (tf_status s = require_arg(corpus && predictions && out_report_json,
                                "tf_evaluate: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    EvaluateOptions options;
    bool with_ood = false;
    OodCalibration ood_calibration;
    FeatureConfig features;
    if (options_json != nullptr && *options_json != '\0') {
      Json doc = Json::parse(options_json, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("tf_evaluate: options must be a JSON object");
      }
      options.skip_empty_classes = doc.value("skip_empty_classes", false);
      options.exclude_neutral_sentiment =
          doc.value("exclude_neutral_sentiment", false);
      with_ood = doc.value("ood", false);
      const std::string mode = doc.value("ood_mode", std::string("none"));
      if (mode == "none") {
        ood_calibration.mode = OodCalibration::Mode::kNone;
      } else if (mode == "consensus") {
        ood_calibration.mode = OodCalibration::Mode::kConsensus;
      } else if (mode == "fitted") {
        ood_calibration.mode = OodCalibration::Mode::kFitted;
      } else {
        throw ConfigError("tf_evaluate: unknown ood_mode '" + mode + "'");
      }
      ood_calibration.tau = doc.value("tau", 0.75);
      if (doc.contains("train")) {
        ood_calibration.train = parse_train_config(doc["train"].dump());
      }
      if (doc.contains("polarity_lexicon")) {
        features = feature_config_for(
            doc["polarity_lexicon"].get<std::string>().c_str());
      }
    }
    ood_calibration.features = &features;
    MetricReport report = evaluate(corpus->value, predictions->value, options);
    if (with_ood) {
      OodResult ood = ood_evaluate(corpus->value, predictions->value,
                                   ood_calibration, options);
      report.ood_macro_f1 = ood.mean;
      report.ood_per_entity = ood.per_entity_macro_f1;
    }
    *out_report_json = copy_string(metric_report_json(report));
  });
}

tf_status tf_render_leaderboard(const char* rows_json, const char* format,
                                char** out_document) {
  if (tf_status s = require_arg(rows_json && format && out_document,
                                "tf_render_leaderboard: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    Json doc = Json::parse(rows_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      throw ConfigError("tf_render_leaderboard: rows must be a JSON array");
    }
    std::vector<LeaderboardRow> rows;
    for (const Json& entry : doc) {
      LeaderboardRow row;
      row.name = entry.value("name", std::string("unnamed"));
      row.notes = entry.value("notes", std::string());
      if (entry.contains("report")) {
        MetricReport report =
            metric_report_from_json(entry["report"].dump());
        row = leaderboard_row(row.name, report, row.notes);
      } else {
        row.bias_ssc = entry.at("bias_ssc").get<double>();
        row.rstd = entry.at("rstd").get<double>();
        row.macro_f1 = entry.at("macro_f1").get<double>();
        if (entry.contains("ood") && !entry["ood"].is_null()) {
          row.ood = entry["ood"].get<double>();
        }
      }
      rows.push_back(std::move(row));
    }
    const std::string format_name = format;
    LeaderboardFormat fmt;
    if (format_name == "markdown") {
      fmt = LeaderboardFormat::kMarkdown;
    } else if (format_name == "csv") {
      fmt = LeaderboardFormat::kCsv;
    } else {
      throw ConfigError("tf_render_leaderboard: format must be markdown or "
                        "csv");
    }
    *out_document = copy_string(render_leaderboard(rows, fmt));
  });
}

tf_status tf_run_pipeline(const char* config_path, const char* overrides_json,
                          char** out_summary_json) {
  if (tf_status s = require_arg(config_path && out_summary_json,
                                "tf_run_pipeline: null argument");
      s != TF_OK) {
    return s;
  }
  return guarded([&] {
    PipelineConfig config = PipelineConfig::from_file(config_path);
    if (overrides_json != nullptr && *overrides_json != '\0') {
      Json overrides = Json::parse(overrides_json, nullptr, false);
      if (overrides.is_discarded() || !overrides.is_object()) {
        throw ConfigError("tf_run_pipeline: overrides must be a JSON object");
      }
      if (overrides.contains("seed")) {
        config.seed = overrides["seed"].get<std::uint64_t>();
      }
      if (overrides.contains("out_dir")) {
        config.out_dir = overrides["out_dir"].get<std::string>();
      }
      if (overrides.contains("trace")) {
        config.predictor.trace = overrides["trace"].get<bool>();
      }
    }
    PipelineResult result = run_pipeline(config);
    *out_summary_json = copy_string(result.summary_json);
  });
}

}  // extern "C"
