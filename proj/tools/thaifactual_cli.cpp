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

// Command-line front end. All functionality goes through the C API in
// thaifactual.h; this file only parses arguments, moves files around and
// formats output.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thaifactual.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Exit codes: 0 success, 1 validation, 2 runtime, 3 config.
int exit_code_for(tf_status status) {
  switch (status) {
    case TF_OK:
      return 0;
    case TF_ERROR_VALIDATION:
    case TF_ERROR_PARSE:
    case TF_ERROR_UNDEFINED:
      return 1;
    case TF_ERROR_CONFIG:
      return 3;
    case TF_ERROR_RUNTIME:
      return 2;
  }
  return 2;
}

[[noreturn]] void fail(tf_status status) {
  std::cerr << "error: " << tf_last_error() << "\n";
  std::exit(exit_code_for(status));
}

void check(tf_status status) {
  if (status != TF_OK) fail(status);
}

struct CorpusHandle {
  tf_corpus* ptr = nullptr;
  ~CorpusHandle() { tf_corpus_free(ptr); }
};

struct PredictionsHandle {
  tf_predictions* ptr = nullptr;
  ~PredictionsHandle() { tf_predictions_free(ptr); }
};

struct CalibratorHandle {
  tf_calibrator* ptr = nullptr;
  ~CalibratorHandle() { tf_calibrator_free(ptr); }
};

std::string take_string(char* s) {
  std::string out = s != nullptr ? s : "";
  tf_string_free(s);
  return out;
}

std::string one_decimal(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", value);
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(3);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(2);
  }
  out << text;
}

void print_report_table(const json& report) {
  std::cout << "metric        value\n";
  std::cout << "bias_ssc      " << one_decimal(report.at("bias_ssc").get<double>())
            << "\n";
  std::cout << "rstd          " << one_decimal(report.at("rstd").get<double>())
            << "\n";
  std::cout << "macro_f1      "
            << one_decimal(report.at("macro_f1").get<double>()) << "\n";
  if (report.contains("ood_macro_f1")) {
    std::cout << "ood_macro_f1  "
              << one_decimal(report["ood_macro_f1"].get<double>()) << "\n";
  }
  std::cout << "n_scored      " << report.value("n_scored", 0) << "\n";
  std::cout << "n_failed      " << report.value("n_failed", 0) << "\n";
  if (report.contains("per_entity")) {
    std::cout << "\nper entity (bias_ssc / rstd / macro_f1):\n";
    for (const auto& [entity, metrics] : report["per_entity"].items()) {
      const auto cell = [&](const char* key) {
        return metrics.contains(key)
                   ? one_decimal(metrics[key].get<double>())
                   : std::string("-");
      };
      std::cout << "  " << entity << "  " << cell("bias_ssc") << " / "
                << cell("rstd") << " / " << cell("macro_f1") << "\n";
    }
  }
  if (report.contains("ood_per_entity")) {
    std::cout << "\nOOD folds (held-out entity -> macro_f1):\n";
    for (const auto& [entity, value] : report["ood_per_entity"].items()) {
      std::cout << "  " << entity << "  " << one_decimal(value.get<double>())
                << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ThaiFACTUAL: stance-bias audit and post-hoc calibration"};
  app.set_version_flag("--version", tf_version());
  app.require_subcommand(1);
  // Let --seed/--out/--trace appear after the subcommand name as well.
  app.fallthrough();
  app.failure_message([](const CLI::App* a, const CLI::Error& e) {
    return CLI::FailureMessage::simple(a, e);
  });

  std::string global_config;
  std::uint64_t global_seed = 0;
  bool seed_given = false;
  std::string global_out;
  bool trace = false;
  app.add_option("--config", global_config, "pipeline config file (for run)");
  app.add_option("--seed", global_seed, "seed override")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--out", global_out, "output path/directory override");
  app.add_flag("--trace", trace, "log request/response traffic");

  // validate ----------------------------------------------------------
  auto* validate = app.add_subcommand(
      "validate", "load and validate a corpus, print its balance report");
  std::string corpus_path, lexicon_path, kappa_path;
  std::size_t tolerance = 0;
  bool as_json = false;
  validate->add_option("--corpus", corpus_path)->required();
  validate->add_option("--lexicon", lexicon_path)->required();
  validate->add_option("--tolerance", tolerance,
                       "allowed per-target count spread (default 0)");
  validate->add_option("--kappa", kappa_path,
                       "annotation file; prints inter-annotator agreement");
  validate->add_flag("--json", as_json, "print the raw balance report JSON");

  // generate-cf --------------------------------------------------------
  auto* generate_cf = app.add_subcommand(
      "generate-cf", "write the counterfactual-augmented corpus");
  std::string out_path;
  generate_cf->add_option("--corpus", corpus_path)->required();
  generate_cf->add_option("--lexicon", lexicon_path)->required();
  generate_cf->add_option("--out", out_path)->required();

  // simulate -----------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "run the synthetic biased predictor over a corpus");
  double leakage = 0.5, accuracy = 0.9;
  std::uint64_t sim_seed = 0;
  std::string cascade = "leakage_first";
  std::vector<std::string> entity_bias;
  std::string sim_config_path;
  simulate->add_option("--corpus", corpus_path)->required();
  simulate->add_option("--lexicon", lexicon_path)->required();
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--leakage", leakage, "sentiment leakage rate [0,1]");
  simulate->add_option("--accuracy", accuracy, "base accuracy [0,1]");
  simulate->add_option("--seed", sim_seed, "generator seed");
  simulate->add_option("--cascade", cascade,
                       "leakage_first (default) or entity_first");
  simulate->add_option("--entity-bias", entity_bias,
                       "entity:label:rate, repeatable");
  simulate->add_option("--sim-config", sim_config_path,
                       "simulator config JSON file (overrides flags)");

  // predict ------------------------------------------------------------
  auto* predict = app.add_subcommand(
      "predict", "query a replay file or a chat endpoint for predictions");
  std::string backend = "replay", replay_path, endpoint, model;
  std::string prompt_name = "raw", prompt_path, cache_path, api_key_env;
  int max_in_flight = 4, retries = 2, retry_backoff_ms = 200;
  predict->add_option("--corpus", corpus_path)->required();
  predict->add_option("--lexicon", lexicon_path)->required();
  predict->add_option("--out", out_path)->required();
  predict->add_option("--backend", backend, "replay or chat")->required();
  predict->add_option("--replay", replay_path, "replay predictions file");
  predict->add_option("--endpoint", endpoint, "chat endpoint base URL");
  predict->add_option("--model", model, "chat model name");
  predict->add_option("--prompt-name", prompt_name, "raw | debias | cot");
  predict->add_option("--prompt", prompt_path, "prompt template file");
  predict->add_option("--cache", cache_path, "response cache file");
  predict->add_option("--api-key-env", api_key_env,
                      "environment variable holding the API key");
  predict->add_option("--max-in-flight", max_in_flight);
  predict->add_option("--retries", retries);
  predict->add_option("--retry-backoff-ms", retry_backoff_ms);

  // calibrate ----------------------------------------------------------
  auto* calibrate = app.add_subcommand(
      "calibrate", "re-score predictions with the calibration layer");
  std::string preds_path, cf_preds_path, model_path, model_out, polarity_path;
  double tau = 0.75;
  bool fit = false;
  double learning_rate = 0.5, l2 = 1e-4, train_tolerance = 1e-9;
  int epochs = 500;
  std::uint64_t train_seed = 0;
  calibrate->add_option("--corpus", corpus_path, "augmented corpus")
      ->required();
  calibrate->add_option("--lexicon", lexicon_path)->required();
  calibrate->add_option("--preds", preds_path)->required();
  calibrate->add_option("--cf-preds", cf_preds_path,
                        "variant predictions, if kept in a separate file");
  calibrate->add_option("--out", out_path)->required();
  calibrate->add_option("--model", model_path, "fitted model file to apply");
  calibrate->add_flag("--fit", fit, "fit the re-scorer before calibrating");
  calibrate->add_option("--model-out", model_out,
                        "where to save the fitted model");
  calibrate->add_option("--tau", tau, "consensus threshold (0.5, 1]");
  calibrate->add_option("--polarity", polarity_path,
                        "word-polarity lexicon for rationale features");
  calibrate->add_option("--learning-rate", learning_rate);
  calibrate->add_option("--epochs", epochs);
  calibrate->add_option("--l2", l2);
  calibrate->add_option("--train-seed", train_seed);
  calibrate->add_option("--train-tolerance", train_tolerance);

  // evaluate -----------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "compute the metric report for a prediction set");
  bool ood = false, skip_empty = false, exclude_neutral = false;
  std::string ood_mode = "none", report_out;
  evaluate->add_option("--corpus", corpus_path)->required();
  evaluate->add_option("--lexicon", lexicon_path)->required();
  evaluate->add_option("--preds", preds_path)->required();
  evaluate->add_option("--model", model_path,
                       "calibrator model to apply before scoring (needs an "
                       "augmented corpus with variant predictions)");
  evaluate->add_flag("--ood", ood, "run the leave-one-entity-out protocol");
  evaluate->add_option("--ood-mode", ood_mode,
                       "none | consensus | fitted (per-fold calibration)");
  evaluate->add_flag("--skip-empty-classes", skip_empty);
  evaluate->add_flag("--exclude-neutral-sentiment", exclude_neutral);
  evaluate->add_option("--tau", tau);
  evaluate->add_option("--polarity", polarity_path);
  evaluate->add_option("--learning-rate", learning_rate);
  evaluate->add_option("--epochs", epochs);
  evaluate->add_option("--l2", l2);
  evaluate->add_option("--json", report_out, "write the report JSON here");

  // report -------------------------------------------------------------
  auto* report_cmd = app.add_subcommand(
      "report", "render a leaderboard from metric report files");
  std::vector<std::string> report_inputs;
  std::string format = "markdown";
  report_cmd->add_option("--in", report_inputs, "name=report.json, repeatable")
      ->required();
  report_cmd->add_option("--format", format, "markdown or csv");
  report_cmd->add_option("--out", out_path, "output file (default stdout)");

  // run ------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "execute the full pipeline");
  std::string run_config;
  run->add_option("--config", run_config, "pipeline config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // usage problems are config errors
  }

  if (validate->parsed()) {
    CorpusHandle corpus;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &corpus.ptr));
    char* report_json = nullptr;
    check(tf_corpus_balance_report(corpus.ptr, tolerance, &report_json));
    const std::string text = take_string(report_json);
    if (as_json) {
      std::cout << text << "\n";
    } else {
      json report = json::parse(text);
      std::cout << "examples: " << tf_corpus_size(corpus.ptr)
                << ", entities: " << tf_corpus_entity_count(corpus.ptr)
                << ", balanced: " << (report["balanced"].get<bool>() ? "yes" : "no")
                << "\n";
      for (const auto& target : report["targets"]) {
        std::cout << "  " << target["target_id"].get<std::string>() << ": "
                  << target["total"].get<std::size_t>() << " examples";
        if (!target["stance_balanced"].get<bool>() ||
            !target["sentiment_balanced"].get<bool>()) {
          std::cout << "  [imbalanced]";
        }
        std::cout << "\n";
      }
    }
    if (!kappa_path.empty()) {
      double kappa = 0.0;
      check(tf_fleiss_kappa_file(kappa_path.c_str(), &kappa));
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "%.4f", kappa);
      std::cout << "fleiss_kappa: " << buffer << "\n";
    }
    return 0;
  }

  if (generate_cf->parsed()) {
    CorpusHandle corpus, augmented;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &corpus.ptr));
    check(tf_generate_counterfactuals(corpus.ptr, &augmented.ptr));
    check(tf_corpus_save(augmented.ptr, out_path.c_str()));
    std::cout << "wrote " << tf_corpus_size(augmented.ptr) << " records ("
              << tf_corpus_size(corpus.ptr) << " originals) to " << out_path
              << "\n";
    return 0;
  }

  if (simulate->parsed()) {
    CorpusHandle corpus;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &corpus.ptr));
    std::string config_text;
    if (!sim_config_path.empty()) {
      config_text = read_file(sim_config_path);
    } else {
      ordered_json config;
      config["leakage_rate"] = leakage;
      config["base_accuracy"] = accuracy;
      config["seed"] = seed_given ? global_seed : sim_seed;
      config["cascade_order"] = cascade;
      ordered_json bias = ordered_json::object();
      for (const std::string& spec : entity_bias) {
        const std::size_t first = spec.find(':');
        const std::size_t second =
            first == std::string::npos ? std::string::npos
                                       : spec.find(':', first + 1);
        if (second == std::string::npos) {
          std::cerr << "error: --entity-bias expects entity:label:rate\n";
          return 3;
        }
        bias[spec.substr(0, first)] = {
            {"label", spec.substr(first + 1, second - first - 1)},
            {"rate", std::stod(spec.substr(second + 1))}};
      }
      config["entity_bias"] = bias;
      config_text = config.dump();
    }
    PredictionsHandle predictions;
    check(tf_simulate(corpus.ptr, config_text.c_str(), &predictions.ptr));
    check(tf_predictions_save(predictions.ptr, out_path.c_str()));
    std::cout << "wrote " << tf_predictions_size(predictions.ptr)
              << " predictions to " << out_path << "\n";
    return 0;
  }

  if (predict->parsed()) {
    CorpusHandle corpus;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &corpus.ptr));
    ordered_json config;
    config["backend"] = backend;
    if (!replay_path.empty()) config["replay_path"] = replay_path;
    if (!endpoint.empty()) config["endpoint"] = endpoint;
    if (!model.empty()) config["model"] = model;
    if (!cache_path.empty()) config["cache"] = cache_path;
    if (!api_key_env.empty()) config["api_key_env"] = api_key_env;
    config["max_in_flight"] = max_in_flight;
    config["retries"] = retries;
    config["retry_backoff_ms"] = retry_backoff_ms;
    config["trace"] = trace;
    PredictionsHandle predictions;
    check(tf_predict(corpus.ptr, config.dump().c_str(), prompt_name.c_str(),
                     prompt_path.c_str(), &predictions.ptr));
    check(tf_predictions_save(predictions.ptr, out_path.c_str()));
    std::cout << "wrote " << tf_predictions_size(predictions.ptr)
              << " predictions to " << out_path << "\n";
    return 0;
  }

  if (calibrate->parsed()) {
    CorpusHandle augmented;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &augmented.ptr));
    PredictionsHandle predictions;
    check(tf_predictions_load(preds_path.c_str(), &predictions.ptr));
    if (!cf_preds_path.empty()) {
      PredictionsHandle cf_predictions, merged;
      check(tf_predictions_load(cf_preds_path.c_str(), &cf_predictions.ptr));
      check(tf_predictions_merge(predictions.ptr, cf_predictions.ptr,
                                 &merged.ptr));
      std::swap(predictions.ptr, merged.ptr);
    }
    CalibratorHandle calibrator;
    if (!model_path.empty() && fit) {
      std::cerr << "error: use either --model or --fit, not both\n";
      return 3;
    }
    if (!model_path.empty()) {
      check(tf_calibrator_load(model_path.c_str(), &calibrator.ptr));
    } else if (fit) {
      ordered_json train;
      train["learning_rate"] = learning_rate;
      train["epochs"] = epochs;
      train["l2"] = l2;
      train["seed"] = seed_given ? global_seed : train_seed;
      train["tolerance"] = train_tolerance;
      check(tf_fit_calibrator(augmented.ptr, predictions.ptr,
                              train.dump().c_str(),
                              polarity_path.empty() ? nullptr
                                                    : polarity_path.c_str(),
                              &calibrator.ptr));
      if (!model_out.empty()) {
        check(tf_calibrator_save(calibrator.ptr, model_out.c_str()));
        std::cout << "saved model to " << model_out << "\n";
      }
    }
    PredictionsHandle calibrated;
    check(tf_calibrate(augmented.ptr, predictions.ptr, calibrator.ptr, tau,
                       polarity_path.empty() ? nullptr : polarity_path.c_str(),
                       &calibrated.ptr));
    check(tf_predictions_save(calibrated.ptr, out_path.c_str()));
    std::cout << "wrote " << tf_predictions_size(calibrated.ptr)
              << " calibrated predictions to " << out_path << "\n";
    return 0;
  }

  if (evaluate->parsed()) {
    CorpusHandle corpus;
    check(tf_corpus_load(corpus_path.c_str(), lexicon_path.c_str(),
                         &corpus.ptr));
    PredictionsHandle predictions;
    check(tf_predictions_load(preds_path.c_str(), &predictions.ptr));
    if (!model_path.empty()) {
      CalibratorHandle calibrator;
      check(tf_calibrator_load(model_path.c_str(), &calibrator.ptr));
      PredictionsHandle calibrated;
      check(tf_calibrate(corpus.ptr, predictions.ptr, calibrator.ptr, tau,
                         polarity_path.empty() ? nullptr
                                               : polarity_path.c_str(),
                         &calibrated.ptr));
      std::swap(predictions.ptr, calibrated.ptr);
    }
    ordered_json options;
    options["skip_empty_classes"] = skip_empty;
    options["exclude_neutral_sentiment"] = exclude_neutral;
    options["ood"] = ood;
    options["ood_mode"] = ood_mode;
    options["tau"] = tau;
    options["train"] = {{"learning_rate", learning_rate},
                        {"epochs", epochs},
                        {"l2", l2}};
    if (!polarity_path.empty()) options["polarity_lexicon"] = polarity_path;
    char* report_json = nullptr;
    check(tf_evaluate(corpus.ptr, predictions.ptr, options.dump().c_str(),
                      &report_json));
    const std::string text = take_string(report_json);
    if (!report_out.empty()) write_file(report_out, text + "\n");
    print_report_table(json::parse(text));
    return 0;
  }

  if (report_cmd->parsed()) {
    ordered_json rows = ordered_json::array();
    for (const std::string& spec : report_inputs) {
      const std::size_t eq = spec.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --in expects name=path\n";
        return 3;
      }
      ordered_json row;
      row["name"] = spec.substr(0, eq);
      row["report"] = json::parse(read_file(spec.substr(eq + 1)));
      rows.push_back(row);
    }
    char* document = nullptr;
    check(tf_render_leaderboard(rows.dump().c_str(), format.c_str(),
                                &document));
    const std::string text = take_string(document);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_file(out_path, text);
      std::cout << "wrote leaderboard to " << out_path << "\n";
    }
    return 0;
  }

  if (run->parsed()) {
    const std::string config_path =
        !run_config.empty() ? run_config : global_config;
    if (config_path.empty()) {
      std::cerr << "error: run needs --config\n";
      return 3;
    }
    ordered_json overrides;
    if (seed_given) overrides["seed"] = global_seed;
    if (!global_out.empty()) overrides["out_dir"] = global_out;
    if (trace) overrides["trace"] = true;
    char* summary = nullptr;
    check(tf_run_pipeline(config_path.c_str(), overrides.dump().c_str(),
                          &summary));
    std::cout << take_string(summary);
    return 0;
  }

  return 0;
}
