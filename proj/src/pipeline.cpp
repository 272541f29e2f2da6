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

#include "thaifactual/pipeline.hpp"

#include <cstdio>
#include <filesystem>

#include "json_util.hpp"
#include "thaifactual/counterfactual.hpp"
#include "thaifactual/error.hpp"
#include "thaifactual/report.hpp"

namespace thaifactual {

using detail::Json;
using detail::OrderedJson;

namespace {

Json parse_object(const std::string& text, const std::string& where) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError(where + ": expected a JSON object");
  }
  return doc;
}

SimulatorConfig simulator_config_from(const Json& obj,
                                      const std::string& where) {
  SimulatorConfig config;
  config.leakage_rate = obj.value("leakage_rate", config.leakage_rate);
  config.base_accuracy = obj.value("base_accuracy", config.base_accuracy);
  config.seed = obj.value("seed", config.seed);
  if (obj.contains("cascade_order")) {
    const std::string order = obj["cascade_order"].get<std::string>();
    if (order == "leakage_first") {
      config.cascade_order = CascadeOrder::kLeakageFirst;
    } else if (order == "entity_first") {
      config.cascade_order = CascadeOrder::kEntityFirst;
    } else {
      throw ConfigError(where + ": cascade_order must be 'leakage_first' or "
                                "'entity_first'");
    }
  }
  if (obj.contains("entity_bias")) {
    const Json& bias = obj["entity_bias"];
    if (!bias.is_object()) {
      throw ConfigError(where + ": entity_bias must map entity ids to "
                                "{label, rate}");
    }
    for (const auto& [entity_id, spec] : bias.items()) {
      EntityBiasSpec parsed;
      auto label = parse_stance_label(spec.value("label", std::string()));
      if (!label) {
        throw ConfigError(where + ": entity_bias['" + entity_id +
                          "'].label must be a stance label");
      }
      parsed.biased_label = *label;
      parsed.rate = spec.value("rate", 0.0);
      config.entity_bias[entity_id] = parsed;
    }
  }
  config.validate();
  return config;
}

PredictorConfig predictor_config_from(const Json& obj,
                                      const std::string& where) {
  PredictorConfig config;
  if (!obj.contains("backend") || !obj["backend"].is_string()) {
    throw ConfigError(where + ": missing 'backend'");
  }
  config.backend = obj["backend"].get<std::string>();
  config.endpoint = obj.value("endpoint", config.endpoint);
  config.request_path = obj.value("request_path", config.request_path);
  config.model = obj.value("model", config.model);
  config.temperature = obj.value("temperature", config.temperature);
  config.max_in_flight = obj.value("max_in_flight", config.max_in_flight);
  config.retries = obj.value("retries", config.retries);
  config.retry_backoff_ms =
      obj.value("retry_backoff_ms", config.retry_backoff_ms);
  config.api_key_env = obj.value("api_key_env", config.api_key_env);
  config.cache_path = obj.value("cache", config.cache_path);
  config.trace = obj.value("trace", config.trace);
  config.replay_path = obj.value("replay_path", config.replay_path);
  config.validate();
  return config;
}

TrainConfig train_config_from(const Json& obj) {
  TrainConfig config;
  config.learning_rate = obj.value("learning_rate", config.learning_rate);
  config.epochs = obj.value("epochs", config.epochs);
  config.l2 = obj.value("l2", config.l2);
  config.seed = obj.value("seed", config.seed);
  config.tolerance = obj.value("tolerance", config.tolerance);
  config.validate();
  return config;
}

}  // namespace

SimulatorConfig parse_simulator_config(const std::string& json_text) {
  return simulator_config_from(parse_object(json_text, "simulator config"),
                               "simulator config");
}

PredictorConfig parse_predictor_config(const std::string& json_text) {
  return predictor_config_from(parse_object(json_text, "predictor config"),
                               "predictor config");
}

TrainConfig parse_train_config(const std::string& json_text) {
  return train_config_from(parse_object(json_text, "train config"));
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text, path);
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text,
                                              const std::string& where) {
  Json doc = parse_object(text, where);
  PipelineConfig config;

  const auto require = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_string() ||
        doc[key].get<std::string>().empty()) {
      throw ConfigError(where + ": missing required key '" +
                        std::string(key) + "'");
    }
    return doc[key].get<std::string>();
  };
  config.corpus_path = require("corpus");
  config.lexicon_path = require("lexicon");
  config.out_dir = require("out_dir");
  config.seed = doc.value("seed", config.seed);

  if (!doc.contains("predictor") || !doc["predictor"].is_object()) {
    throw ConfigError(where + ": missing 'predictor' object");
  }
  const Json& predictor = doc["predictor"];
  config.predictor = predictor_config_from(predictor, where + ": predictor");
  if (config.predictor.backend == "simulator") {
    config.simulator =
        predictor.contains("simulator")
            ? simulator_config_from(predictor["simulator"],
                                    where + ": predictor.simulator")
            : SimulatorConfig{};
  }
  config.prompt_template_name =
      predictor.value("prompt_template", config.prompt_template_name);
  config.prompt_template_path =
      predictor.value("prompt_path", config.prompt_template_path);
  if (config.predictor.backend == "chat" &&
      config.prompt_template_path.empty()) {
    throw ConfigError(where + ": chat backend needs predictor.prompt_path");
  }

  if (doc.contains("calibration")) {
    const Json& calibration = doc["calibration"];
    const std::string mode = calibration.value("mode", std::string("fitted"));
    if (mode == "none") {
      config.calibration_mode = CalibrationMode::kNone;
    } else if (mode == "consensus") {
      config.calibration_mode = CalibrationMode::kConsensus;
    } else if (mode == "fitted") {
      config.calibration_mode = CalibrationMode::kFitted;
    } else {
      throw ConfigError(where + ": calibration.mode must be none, consensus "
                                "or fitted");
    }
    config.tau = calibration.value("tau", config.tau);
    if (!(config.tau > 0.5 && config.tau <= 1.0)) {
      throw ConfigError(where + ": calibration.tau must lie in (0.5, 1]");
    }
    config.polarity_lexicon_path =
        calibration.value("polarity_lexicon", config.polarity_lexicon_path);
    if (calibration.contains("train")) {
      config.train = train_config_from(calibration["train"]);
    }
  }

  if (doc.contains("evaluate")) {
    const Json& evaluate = doc["evaluate"];
    config.evaluate_options.skip_empty_classes =
        evaluate.value("skip_empty_classes", false);
    config.evaluate_options.exclude_neutral_sentiment =
        evaluate.value("exclude_neutral_sentiment", false);
    config.ood = evaluate.value("ood", true);
  }

  if (doc.contains("report") && doc["report"].contains("formats")) {
    config.write_markdown = false;
    config.write_csv = false;
    for (const Json& format : doc["report"]["formats"]) {
      const std::string name = format.get<std::string>();
      if (name == "markdown") {
        config.write_markdown = true;
      } else if (name == "csv") {
        config.write_csv = true;
      } else {
        throw ConfigError(where + ": unknown report format '" + name + "'");
      }
    }
  }
  return config;
}

namespace {

void write_text(const std::string& path, const std::string& text,
                std::vector<std::string>& artifacts) {
  std::ofstream out = detail::open_output(path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
  artifacts.push_back(path);
}

std::string short_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  std::filesystem::create_directories(config.out_dir);
  const auto artifact = [&](const std::string& name) {
    return join_path(config.out_dir, name);
  };

  // Stage 1: load + validate, record the balance summary.
  Corpus corpus = load_corpus(config.corpus_path, config.lexicon_path);
  write_text(artifact("balance.json"),
             balance_report_json(balance_report(corpus)) + "\n",
             result.artifacts);

  // Stage 2: counterfactual augmentation, variants beside their sources.
  Corpus augmented = generate_augmented_corpus(corpus);
  save_corpus(augmented, artifact("augmented.jsonl"));
  result.artifacts.push_back(artifact("augmented.jsonl"));

  // Stage 3: base predictions over originals and variants alike.
  PredictionSet predictions;
  if (config.predictor.backend == "simulator") {
    SimulatorConfig simulator = config.simulator;
    simulator.seed = config.seed;
    predictions = simulate_batch(augmented, simulator);
  } else if (config.predictor.backend == "replay") {
    PredictionSet replay = PredictionSet::load(config.predictor.replay_path);
    PredictionSet assembled;
    for (PredictionRecord& record :
         replay_batch(augmented.examples(), replay)) {
      assembled.add(std::move(record));
    }
    predictions = std::move(assembled);
  } else {  // chat
    PromptTemplate tpl = load_prompt_template(config.prompt_template_name,
                                              config.prompt_template_path);
    ResponseCache cache = config.predictor.cache_path.empty()
                              ? ResponseCache()
                              : ResponseCache(config.predictor.cache_path);
    std::unique_ptr<StanceBackend> backend =
        make_chat_backend(config.predictor);
    PredictionSet assembled;
    for (PredictionRecord& record :
         predict_batch(*backend, augmented.examples(), augmented.lexicon(),
                       tpl, config.predictor, cache)) {
      assembled.add(std::move(record));
    }
    predictions = std::move(assembled);
  }
  predictions.save(artifact("predictions.jsonl"));
  result.artifacts.push_back(artifact("predictions.jsonl"));

  // Stage 4: calibration layer.
  FeatureConfig features;
  if (!config.polarity_lexicon_path.empty()) {
    features.polarity = PolarityLexicon::load(config.polarity_lexicon_path);
  }
  std::optional<PredictionSet> calibrated;
  std::optional<CalibratorModel> model;
  if (config.calibration_mode != CalibrationMode::kNone) {
    std::vector<CounterfactualSet> sets = group_counterfactual_sets(augmented);
    if (config.calibration_mode == CalibrationMode::kFitted) {
      TrainConfig train = config.train;
      train.seed = config.seed;
      std::vector<TrainingRow> rows =
          build_training_rows(sets, predictions, augmented.lexicon(), features);
      model = fit_calibrator(rows, train);
      model->tau = config.tau;
      model->save(artifact("calibrator.json"));
      result.artifacts.push_back(artifact("calibrator.json"));
      calibrated = calibrate_batch(sets, predictions, &*model, config.tau,
                                   augmented.lexicon(), features);
    } else {
      calibrated = calibrate_batch(sets, predictions, nullptr, config.tau,
                                   augmented.lexicon(), features);
    }
    calibrated->save(artifact("calibrated.jsonl"));
    result.artifacts.push_back(artifact("calibrated.jsonl"));
  }

  // Stage 5: evaluation, including the leave-one-entity-out protocol.
  result.raw_report = evaluate(augmented, predictions, config.evaluate_options);
  if (config.ood) {
    OodCalibration none;
    OodResult raw_ood =
        ood_evaluate(augmented, predictions, none, config.evaluate_options);
    result.raw_report.ood_macro_f1 = raw_ood.mean;
    result.raw_report.ood_per_entity = raw_ood.per_entity_macro_f1;
  }
  write_text(artifact("report_raw.json"),
             metric_report_json(result.raw_report) + "\n", result.artifacts);

  if (calibrated) {
    MetricReport report =
        evaluate(augmented, *calibrated, config.evaluate_options);
    report.polarity_lexicon_missing =
        config.polarity_lexicon_path.empty() &&
        config.calibration_mode == CalibrationMode::kFitted;
    if (config.ood) {
      OodCalibration ood_calibration;
      ood_calibration.mode =
          config.calibration_mode == CalibrationMode::kFitted
              ? OodCalibration::Mode::kFitted
              : OodCalibration::Mode::kConsensus;
      ood_calibration.tau = config.tau;
      TrainConfig train = config.train;
      train.seed = config.seed;
      ood_calibration.train = train;
      ood_calibration.features = &features;
      OodResult calibrated_ood =
          ood_evaluate(augmented, predictions, ood_calibration,
                       config.evaluate_options);
      report.ood_macro_f1 = calibrated_ood.mean;
      report.ood_per_entity = calibrated_ood.per_entity_macro_f1;
    }
    write_text(artifact("report_calibrated.json"),
               metric_report_json(report) + "\n", result.artifacts);
    result.calibrated_report = std::move(report);
  }

  // Stage 6: leaderboard.
  std::vector<LeaderboardRow> rows;
  {
    std::string notes;
    if (config.predictor.backend == "simulator") {
      notes = "synthetic predictor, leakage=" +
              short_number(config.simulator.leakage_rate);
    } else if (config.predictor.backend == "chat") {
      notes = config.predictor.model + ", " + config.prompt_template_name +
              " prompt";
    } else {
      notes = "replayed predictions";
    }
    rows.push_back(leaderboard_row(config.predictor.backend + " (raw)",
                                   result.raw_report, notes));
  }
  if (result.calibrated_report) {
    std::string notes =
        config.calibration_mode == CalibrationMode::kFitted
            ? "counterfactual + rationale re-scorer"
            : "consensus fallback, tau=" + short_number(config.tau);
    rows.push_back(
        leaderboard_row("thaifactual", *result.calibrated_report, notes));
  }
  if (config.write_markdown) {
    write_text(artifact("leaderboard.md"),
               render_leaderboard(rows, LeaderboardFormat::kMarkdown),
               result.artifacts);
  }
  if (config.write_csv) {
    write_text(artifact("leaderboard.csv"),
               render_leaderboard(rows, LeaderboardFormat::kCsv),
               result.artifacts);
  }

  OrderedJson summary;
  summary["seed"] = config.seed;
  summary["backend"] = config.predictor.backend;
  summary["n_examples"] = corpus.size();
  summary["n_augmented"] = augmented.size();
  summary["raw"] = {{"bias_ssc", result.raw_report.bias_ssc},
                    {"rstd", result.raw_report.rstd},
                    {"macro_f1", result.raw_report.macro_f1}};
  if (result.raw_report.ood_macro_f1) {
    summary["raw"]["ood_macro_f1"] = *result.raw_report.ood_macro_f1;
  }
  if (result.calibrated_report) {
    summary["calibrated"] = {
        {"bias_ssc", result.calibrated_report->bias_ssc},
        {"rstd", result.calibrated_report->rstd},
        {"macro_f1", result.calibrated_report->macro_f1}};
    if (result.calibrated_report->ood_macro_f1) {
      summary["calibrated"]["ood_macro_f1"] =
          *result.calibrated_report->ood_macro_f1;
    }
  }
  summary["artifacts"] = result.artifacts;
  result.summary_json = summary.dump(2) + "\n";
  write_text(artifact("summary.json"), result.summary_json, result.artifacts);
  return result;
}

}  // namespace thaifactual
