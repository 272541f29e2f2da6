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

#ifndef THAIFACTUAL_PIPELINE_HPP_
#define THAIFACTUAL_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thaifactual/calibration.hpp"
#include "thaifactual/metrics.hpp"
#include "thaifactual/predictor.hpp"
#include "thaifactual/simulator.hpp"

namespace thaifactual {

// Config-string parsers shared by the pipeline, the C API and the CLI.
SimulatorConfig parse_simulator_config(const std::string& json_text);
PredictorConfig parse_predictor_config(const std::string& json_text);
TrainConfig parse_train_config(const std::string& json_text);

enum class CalibrationMode { kNone, kConsensus, kFitted };

struct PipelineConfig {
  std::string corpus_path;
  std::string lexicon_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  PredictorConfig predictor;
  SimulatorConfig simulator;
  std::string prompt_template_name = "raw";
  std::string prompt_template_path;

  CalibrationMode calibration_mode = CalibrationMode::kFitted;
  double tau = 0.75;
  TrainConfig train;
  std::string polarity_lexicon_path;

  EvaluateOptions evaluate_options;
  bool ood = true;

  bool write_markdown = true;
  bool write_csv = true;

  // Parses and validates; unknown backends, bad modes and missing required
  // keys fail here, before any stage runs.
  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text,
                                       const std::string& where);
};

struct PipelineResult {
  MetricReport raw_report;
  std::optional<MetricReport> calibrated_report;
  std::vector<std::string> artifacts;  // paths written, in stage order
  std::string summary_json;
};

// validate -> generate-cf -> predict -> fit/calibrate -> evaluate (with the
// leave-one-entity-out protocol) -> report. Every stage writes its artifact
// under out_dir before the next begins; a rerun with identical inputs, seed
// and a warm cache is byte-identical.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace thaifactual

#endif  // THAIFACTUAL_PIPELINE_HPP_
