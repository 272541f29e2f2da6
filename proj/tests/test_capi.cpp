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

// Exercises the shared-library C surface the way an external binding would:
// through thaifactual.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "thaifactual.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string data_file(const std::string& name) {
  return (fs::path(THAIFACTUAL_DATA_DIR) / name).string();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("thaifactual_capi_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  tf_string_free(s);
  return out;
}

struct Corpus {
  tf_corpus* ptr = nullptr;
  ~Corpus() { tf_corpus_free(ptr); }
};

struct Predictions {
  tf_predictions* ptr = nullptr;
  ~Predictions() { tf_predictions_free(ptr); }
};

struct Calibrator {
  tf_calibrator* ptr = nullptr;
  ~Calibrator() { tf_calibrator_free(ptr); }
};

Corpus load_bundled() {
  Corpus corpus;
  REQUIRE(tf_corpus_load(data_file("corpus.jsonl").c_str(),
                         data_file("lexicon.json").c_str(),
                         &corpus.ptr) == TF_OK);
  return corpus;
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::strlen(tf_version()) > 0);
  CHECK(tf_last_error() != nullptr);
}

TEST_CASE("corpus loads, reports balance, saves and splits") {
  Corpus corpus = load_bundled();
  CHECK(tf_corpus_size(corpus.ptr) == 270);
  CHECK(tf_corpus_entity_count(corpus.ptr) == 3);

  char* report_json = nullptr;
  REQUIRE(tf_corpus_balance_report(corpus.ptr, 0, &report_json) == TF_OK);
  json report = json::parse(take(report_json));
  CHECK(report["balanced"].get<bool>());
  CHECK(report["total"].get<int>() == 270);

  TempDir tmp;
  REQUIRE(tf_corpus_save(corpus.ptr, tmp.file("copy.jsonl").c_str()) == TF_OK);
  Corpus reloaded;
  REQUIRE(tf_corpus_load(tmp.file("copy.jsonl").c_str(),
                         data_file("lexicon.json").c_str(),
                         &reloaded.ptr) == TF_OK);
  CHECK(tf_corpus_size(reloaded.ptr) == 270);

  Corpus fit, eval;
  REQUIRE(tf_corpus_split(corpus.ptr, "chalida", &fit.ptr, &eval.ptr) == TF_OK);
  CHECK(tf_corpus_size(fit.ptr) == 180);
  CHECK(tf_corpus_size(eval.ptr) == 90);
  tf_corpus* junk = nullptr;
  CHECK(tf_corpus_split(corpus.ptr, "ghost", &junk, &junk) ==
        TF_ERROR_VALIDATION);
  CHECK(std::strlen(tf_last_error()) > 0);
}

TEST_CASE("error kinds map to distinct statuses") {
  tf_corpus* corpus = nullptr;
  CHECK(tf_corpus_load("/no/such/file.jsonl",
                       data_file("lexicon.json").c_str(),
                       &corpus) == TF_ERROR_RUNTIME);

  TempDir tmp;
  write_file(tmp.file("broken.jsonl"), "this is not json\n");
  CHECK(tf_corpus_load(tmp.file("broken.jsonl").c_str(),
                       data_file("lexicon.json").c_str(),
                       &corpus) == TF_ERROR_PARSE);

  write_file(
      tmp.file("badstance.jsonl"),
      R"({"id":"x","text":"Arthit","target_id":"arthit","stance":"Supported","sentiment":"neutral","provenance":"original"})"
      "\n");
  CHECK(tf_corpus_load(tmp.file("badstance.jsonl").c_str(),
                       data_file("lexicon.json").c_str(),
                       &corpus) == TF_ERROR_VALIDATION);

  CHECK(tf_corpus_load(nullptr, nullptr, nullptr) == TF_ERROR_CONFIG);
}

TEST_CASE("fleiss kappa through the C surface") {
  double kappa = 0.0;
  REQUIRE(tf_fleiss_kappa_file(data_file("annotations.jsonl").c_str(),
                               &kappa) == TF_OK);
  CHECK(kappa == doctest::Approx(0.8407).epsilon(1e-3));

  TempDir tmp;
  write_file(tmp.file("degenerate.jsonl"),
             R"({"item_id":"a","labels":["support","support","support"]})"
             "\n");
  CHECK(tf_fleiss_kappa_file(tmp.file("degenerate.jsonl").c_str(), &kappa) ==
        TF_ERROR_UNDEFINED);
}

TEST_CASE("counterfactual generation, simulation and evaluation") {
  Corpus corpus = load_bundled();
  Corpus augmented;
  REQUIRE(tf_generate_counterfactuals(corpus.ptr, &augmented.ptr) == TF_OK);
  CHECK(tf_corpus_size(augmented.ptr) == 810);

  const char* sim_config = R"({
    "leakage_rate": 0.5, "base_accuracy": 0.9, "seed": 11,
    "entity_bias": {"boonmee": {"label": "against", "rate": 0.6}}
  })";
  Predictions preds;
  REQUIRE(tf_simulate(augmented.ptr, sim_config, &preds.ptr) == TF_OK);
  CHECK(tf_predictions_size(preds.ptr) == 810);

  Predictions bad;
  CHECK(tf_simulate(augmented.ptr, R"({"leakage_rate": 7})", &bad.ptr) ==
        TF_ERROR_CONFIG);

  TempDir tmp;
  REQUIRE(tf_predictions_save(preds.ptr, tmp.file("preds.jsonl").c_str()) ==
          TF_OK);
  Predictions reloaded;
  REQUIRE(tf_predictions_load(tmp.file("preds.jsonl").c_str(),
                              &reloaded.ptr) == TF_OK);
  CHECK(tf_predictions_size(reloaded.ptr) == 810);

  Calibrator model;
  REQUIRE(tf_fit_calibrator(
              augmented.ptr, preds.ptr,
              R"({"learning_rate": 0.5, "epochs": 300, "l2": 1e-4})",
              data_file("polarity_lexicon.json").c_str(),
              &model.ptr) == TF_OK);
  REQUIRE(tf_calibrator_save(model.ptr, tmp.file("model.json").c_str()) ==
          TF_OK);
  Calibrator loaded;
  REQUIRE(tf_calibrator_load(tmp.file("model.json").c_str(), &loaded.ptr) ==
          TF_OK);

  Predictions calibrated;
  REQUIRE(tf_calibrate(augmented.ptr, preds.ptr, loaded.ptr, 0.75,
                       data_file("polarity_lexicon.json").c_str(),
                       &calibrated.ptr) == TF_OK);
  CHECK(tf_predictions_size(calibrated.ptr) == 270);

  char* report_json = nullptr;
  REQUIRE(tf_evaluate(augmented.ptr, calibrated.ptr,
                      R"({"ood": true, "ood_mode": "none"})",
                      &report_json) == TF_OK);
  json report = json::parse(take(report_json));
  CHECK(report.contains("bias_ssc"));
  CHECK(report.contains("ood_macro_f1"));
  CHECK(report["n_scored"].get<int>() == 270);

  // Consensus fallback through a null model.
  Predictions fallback;
  REQUIRE(tf_calibrate(augmented.ptr, preds.ptr, nullptr, 0.75, nullptr,
                       &fallback.ptr) == TF_OK);
  CHECK(tf_predictions_size(fallback.ptr) == 270);
}

TEST_CASE("predictions merge and reject duplicates") {
  TempDir tmp;
  write_file(tmp.file("a.jsonl"),
             R"({"example_id":"x","label":"support"})"
             "\n");
  write_file(tmp.file("b.jsonl"),
             R"({"example_id":"y","label":"against"})"
             "\n");
  Predictions a, b, merged;
  REQUIRE(tf_predictions_load(tmp.file("a.jsonl").c_str(), &a.ptr) == TF_OK);
  REQUIRE(tf_predictions_load(tmp.file("b.jsonl").c_str(), &b.ptr) == TF_OK);
  REQUIRE(tf_predictions_merge(a.ptr, b.ptr, &merged.ptr) == TF_OK);
  CHECK(tf_predictions_size(merged.ptr) == 2);
  tf_predictions* dup = nullptr;
  CHECK(tf_predictions_merge(a.ptr, a.ptr, &dup) == TF_ERROR_VALIDATION);
}

TEST_CASE("replay predictions through tf_predict") {
  Corpus corpus = load_bundled();
  TempDir tmp;
  // gold replay built from the corpus file itself
  std::string corpus_text = read_file(data_file("corpus.jsonl"));
  std::string replay;
  std::istringstream lines(corpus_text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json record = json::parse(line);
    replay += json{{"example_id", record["id"]},
                   {"label", record["stance"]}}
                  .dump() +
              "\n";
  }
  write_file(tmp.file("replay.jsonl"), replay);
  json config = {{"backend", "replay"},
                 {"replay_path", tmp.file("replay.jsonl")}};
  Predictions preds;
  REQUIRE(tf_predict(corpus.ptr, config.dump().c_str(), nullptr, nullptr,
                     &preds.ptr) == TF_OK);
  CHECK(tf_predictions_size(preds.ptr) == 270);

  char* report_json = nullptr;
  REQUIRE(tf_evaluate(corpus.ptr, preds.ptr, nullptr, &report_json) == TF_OK);
  json report = json::parse(take(report_json));
  CHECK(report["macro_f1"].get<double>() == 100.0);
  CHECK(report["rstd"].get<double>() == 0.0);
}

TEST_CASE("leaderboard rendering from report rows") {
  json rows = json::array(
      {{{"name", "raw"},
        {"bias_ssc", 21.7},
        {"rstd", 15.2},
        {"macro_f1", 70.8},
        {"ood", 56.4},
        {"notes", "baseline"}},
       {{"name", "thaifactual"},
        {"bias_ssc", 9.8},
        {"rstd", 6.4},
        {"macro_f1", 73.5},
        {"ood", 65.2}}});
  char* doc = nullptr;
  REQUIRE(tf_render_leaderboard(rows.dump().c_str(), "markdown", &doc) ==
          TF_OK);
  std::string markdown = take(doc);
  CHECK(markdown.find("**9.8**") != std::string::npos);
  REQUIRE(tf_render_leaderboard(rows.dump().c_str(), "csv", &doc) == TF_OK);
  CHECK(take(doc).find("thaifactual") != std::string::npos);
  CHECK(tf_render_leaderboard(rows.dump().c_str(), "pdf", &doc) ==
        TF_ERROR_CONFIG);
}

TEST_CASE("the pipeline runs end to end through the C API") {
  TempDir tmp;
  // Same shape as the bundled sample config, with paths resolved for the
  // test working directory.
  json config = json::parse(read_file(data_file("pipeline.json")));
  config["corpus"] = data_file("corpus.jsonl");
  config["lexicon"] = data_file("lexicon.json");
  config["calibration"]["polarity_lexicon"] =
      data_file("polarity_lexicon.json");
  config["out_dir"] = tmp.file("out");
  write_file(tmp.file("pipeline.json"), config.dump(2));

  json overrides = {{"seed", 7}};
  char* summary_json = nullptr;
  REQUIRE(tf_run_pipeline(tmp.file("pipeline.json").c_str(),
                          overrides.dump().c_str(),
                          &summary_json) == TF_OK);
  json summary = json::parse(take(summary_json));
  CHECK(summary["seed"].get<int>() == 7);
  CHECK(summary["n_examples"].get<int>() == 270);
  CHECK(summary.contains("calibrated"));
  CHECK(fs::exists(tmp.path / "out" / "leaderboard.md"));

  // Identical rerun produces an identical summary.
  char* again = nullptr;
  REQUIRE(tf_run_pipeline(tmp.file("pipeline.json").c_str(),
                          overrides.dump().c_str(), &again) == TF_OK);
  CHECK(json::parse(take(again)) == summary);
}

TEST_CASE("pipeline config errors surface as TF_ERROR_CONFIG") {
  TempDir tmp;
  write_file(tmp.file("bad.json"), R"({"lexicon": "x"})");
  char* summary = nullptr;
  CHECK(tf_run_pipeline(tmp.file("bad.json").c_str(), nullptr, &summary) ==
        TF_ERROR_CONFIG);
  CHECK(std::string(tf_last_error()).find("corpus") != std::string::npos);
}
