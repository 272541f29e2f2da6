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

// End-to-end tests that spawn the installed CLI binary and assert on exit
// codes, output files and the documented subcommand contracts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

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
           ("thaifactual_cli_" + std::to_string(::getpid()) + "_" +
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

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  TempDir scratch;
  const std::string log = scratch.file("out.log");
  const std::string command =
      std::string(THAIFACTUAL_CLI) + " " + args + " > " + log + " 2>&1";
  int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = read_file(log);
  return result;
}

std::string corpus_args() {
  return "--corpus " + data_file("corpus.jsonl") + " --lexicon " +
         data_file("lexicon.json");
}

}  // namespace

TEST_CASE("validate prints the balance verdict and kappa") {
  RunResult result = run_cli("validate " + corpus_args() + " --kappa " +
                             data_file("annotations.jsonl"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("balanced: yes") != std::string::npos);
  CHECK(result.output.find("fleiss_kappa: 0.84") != std::string::npos);
}

TEST_CASE("validate exits 1 on invalid data") {
  TempDir tmp;
  write_file(
      tmp.file("bad.jsonl"),
      R"({"id":"x","text":"Arthit","target_id":"arthit","stance":"Supported","sentiment":"neutral","provenance":"original"})"
      "\n");
  RunResult result = run_cli("validate --corpus " + tmp.file("bad.jsonl") +
                             " --lexicon " + data_file("lexicon.json"));
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("error:") != std::string::npos);
}

TEST_CASE("unknown flags are a usage error, exit 3") {
  RunResult result = run_cli("validate --no-such-flag");
  CHECK(result.exit_code == 3);
}

TEST_CASE("generate-cf writes variants directly after their source") {
  TempDir tmp;
  RunResult result = run_cli("generate-cf " + corpus_args() + " --out " +
                             tmp.file("augmented.jsonl"));
  CHECK(result.exit_code == 0);
  std::istringstream lines(read_file(tmp.file("augmented.jsonl")));
  std::string line;
  std::string current_source;
  int originals = 0, variants = 0;
  while (std::getline(lines, line)) {
    json record = json::parse(line);
    if (record["provenance"] == "original") {
      current_source = record["id"];
      ++originals;
    } else {
      CHECK(record["source_id"] == current_source);
      ++variants;
    }
  }
  CHECK(originals == 270);
  CHECK(variants == 540);
}

TEST_CASE("simulate emits a replay-compatible predictions file") {
  TempDir tmp;
  RunResult simulate = run_cli("simulate " + corpus_args() + " --out " +
                               tmp.file("sim.jsonl") +
                               " --seed 9 --leakage 0.4 --accuracy 0.9 "
                               "--entity-bias boonmee:against:0.6");
  CHECK(simulate.exit_code == 0);

  // Feed the simulator output straight back through the replay backend.
  RunResult replay = run_cli("predict " + corpus_args() +
                             " --backend replay --replay " +
                             tmp.file("sim.jsonl") + " --out " +
                             tmp.file("replayed.jsonl"));
  CHECK(replay.exit_code == 0);
  CHECK(read_file(tmp.file("replayed.jsonl")).find("simulator") !=
        std::string::npos);

  // Same seed, same output bytes.
  RunResult again = run_cli("simulate " + corpus_args() + " --out " +
                            tmp.file("sim2.jsonl") +
                            " --seed 9 --leakage 0.4 --accuracy 0.9 "
                            "--entity-bias boonmee:against:0.6");
  CHECK(again.exit_code == 0);
  CHECK(read_file(tmp.file("sim.jsonl")) == read_file(tmp.file("sim2.jsonl")));
}

TEST_CASE("calibrate fits, saves a model, and applies it") {
  TempDir tmp;
  REQUIRE(run_cli("generate-cf " + corpus_args() + " --out " +
                  tmp.file("augmented.jsonl"))
              .exit_code == 0);
  REQUIRE(run_cli("simulate --corpus " + tmp.file("augmented.jsonl") +
                  " --lexicon " + data_file("lexicon.json") + " --out " +
                  tmp.file("preds.jsonl") + " --seed 3 --leakage 0.5")
              .exit_code == 0);

  RunResult fit = run_cli(
      "calibrate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("preds.jsonl") +
      " --fit --model-out " + tmp.file("model.json") + " --polarity " +
      data_file("polarity_lexicon.json") + " --out " +
      tmp.file("calibrated.jsonl"));
  CHECK(fit.exit_code == 0);
  CHECK(fs::exists(tmp.file("model.json")));
  CHECK(json::parse(read_file(tmp.file("model.json")))["format"] ==
        "thaifactual-calibrator");

  RunResult apply = run_cli(
      "calibrate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("preds.jsonl") +
      " --model " + tmp.file("model.json") + " --polarity " +
      data_file("polarity_lexicon.json") + " --out " +
      tmp.file("calibrated2.jsonl"));
  CHECK(apply.exit_code == 0);
  CHECK(read_file(tmp.file("calibrated.jsonl")) ==
        read_file(tmp.file("calibrated2.jsonl")));

  // Without --fit and without --model: consensus fallback.
  RunResult fallback = run_cli(
      "calibrate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("preds.jsonl") +
      " --tau 0.75 --out " + tmp.file("fallback.jsonl"));
  CHECK(fallback.exit_code == 0);
  CHECK(read_file(tmp.file("fallback.jsonl")).find("thaifactual-fallback") !=
        std::string::npos);

  // evaluate accepts the fitted model directly.
  RunResult scored = run_cli(
      "evaluate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("preds.jsonl") +
      " --model " + tmp.file("model.json") + " --polarity " +
      data_file("polarity_lexicon.json"));
  CHECK(scored.exit_code == 0);
  CHECK(scored.output.find("n_scored      270") != std::string::npos);

  // Per-fold refitting through the evaluate subcommand.
  RunResult fitted_ood = run_cli(
      "evaluate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("preds.jsonl") +
      " --ood --ood-mode fitted --polarity " +
      data_file("polarity_lexicon.json"));
  CHECK(fitted_ood.exit_code == 0);
  CHECK(fitted_ood.output.find("OOD folds") != std::string::npos);

  // Base and variant predictions may also arrive as two separate files.
  std::istringstream preds_lines(read_file(tmp.file("preds.jsonl")));
  std::string base_rows, cf_rows, line;
  while (std::getline(preds_lines, line)) {
    if (line.empty()) continue;
    (line.find("::cf::") == std::string::npos ? base_rows : cf_rows) +=
        line + "\n";
  }
  write_file(tmp.file("base.jsonl"), base_rows);
  write_file(tmp.file("cf.jsonl"), cf_rows);
  RunResult split_inputs = run_cli(
      "calibrate --corpus " + tmp.file("augmented.jsonl") + " --lexicon " +
      data_file("lexicon.json") + " --preds " + tmp.file("base.jsonl") +
      " --cf-preds " + tmp.file("cf.jsonl") + " --model " +
      tmp.file("model.json") + " --polarity " +
      data_file("polarity_lexicon.json") + " --out " +
      tmp.file("calibrated3.jsonl"));
  CHECK(split_inputs.exit_code == 0);
  CHECK(read_file(tmp.file("calibrated3.jsonl")) ==
        read_file(tmp.file("calibrated.jsonl")));
}

TEST_CASE("evaluate prints the metric table for gold replay") {
  TempDir tmp;
  // Build a gold replay file from the corpus.
  std::istringstream lines(read_file(data_file("corpus.jsonl")));
  std::string line, replay;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json record = json::parse(line);
    replay += json{{"example_id", record["id"]}, {"label", record["stance"]}}
                  .dump() +
              "\n";
  }
  write_file(tmp.file("gold.jsonl"), replay);

  RunResult result = run_cli("evaluate " + corpus_args() + " --preds " +
                             tmp.file("gold.jsonl") + " --ood --json " +
                             tmp.file("report.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("macro_f1      100.0") != std::string::npos);
  CHECK(result.output.find("rstd          0.0") != std::string::npos);
  json report = json::parse(read_file(tmp.file("report.json")));
  CHECK(report["ood_macro_f1"].get<double>() == 100.0);

  RunResult board = run_cli("report --in gold=" + tmp.file("report.json") +
                            " --format csv --out " + tmp.file("board.csv"));
  CHECK(board.exit_code == 0);
  CHECK(read_file(tmp.file("board.csv")).find("gold,") != std::string::npos);
}

TEST_CASE("run executes the bundled pipeline and is reproducible") {
  TempDir tmp;
  // The sample config carries repo-root-relative paths; rewrite them so the
  // run works from the test's working directory.
  json config = json::parse(read_file(data_file("pipeline.json")));
  config["corpus"] = data_file("corpus.jsonl");
  config["lexicon"] = data_file("lexicon.json");
  config["calibration"]["polarity_lexicon"] =
      data_file("polarity_lexicon.json");
  config["out_dir"] = tmp.file("unused");
  write_file(tmp.file("pipeline.json"), config.dump(2));

  const std::string out_a = tmp.file("out_a");
  RunResult first =
      run_cli("run --config " + tmp.file("pipeline.json") + " --out " + out_a);
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("\"calibrated\"") != std::string::npos);
  CHECK(fs::exists(fs::path(out_a) / "leaderboard.md"));
  CHECK(fs::exists(fs::path(out_a) / "summary.json"));

  RunResult second =
      run_cli("run --config " + tmp.file("pipeline.json") + " --out " + out_a);
  CHECK(second.exit_code == 0);
  CHECK(first.output == second.output);

  std::string leaderboard = read_file((fs::path(out_a) / "leaderboard.md").string());
  CHECK(leaderboard.find("simulator (raw)") != std::string::npos);
  CHECK(leaderboard.find("thaifactual") != std::string::npos);
}

TEST_CASE("run without a config and with a bad config") {
  CHECK(run_cli("run").exit_code == 3);
  TempDir tmp;
  write_file(tmp.file("missing.json"), R"({"lexicon": "x", "out_dir": "y"})");
  RunResult result = run_cli("run --config " + tmp.file("missing.json"));
  CHECK(result.exit_code == 3);
  CHECK(result.output.find("corpus") != std::string::npos);
}

TEST_CASE("missing input files exit as runtime errors") {
  RunResult result = run_cli("validate --corpus /no/such.jsonl --lexicon " +
                             data_file("lexicon.json"));
  CHECK(result.exit_code == 2);
}
