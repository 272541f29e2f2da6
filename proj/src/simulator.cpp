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

#include "thaifactual/simulator.hpp"

#include "thaifactual/error.hpp"
#include "thaifactual/sha256.hpp"

namespace thaifactual {

namespace {

void check_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(std::string("simulator ") + name +
                      " must lie in [0, 1]");
  }
}

StanceLabel random_non_gold(StanceLabel gold, RandomStream& stream) {
  StanceLabel candidates[2];
  int k = 0;
  for (StanceLabel label : kAllStanceLabels) {
    if (label != gold) candidates[k++] = label;
  }
  return candidates[stream.next_index(2)];
}

}  // namespace

void SimulatorConfig::validate() const {
  check_rate(leakage_rate, "leakage_rate");
  check_rate(base_accuracy, "base_accuracy");
  for (const auto& [entity_id, spec] : entity_bias) {
    check_rate(spec.rate, ("entity_bias[" + entity_id + "].rate").c_str());
  }
}

PredictionRecord simulate_prediction(const Example& example,
                                     const SimulatorConfig& config,
                                     RandomStream& stream) {
  const auto leakage_stage = [&]() -> std::optional<StanceLabel> {
    if (stream.next_unit() < config.leakage_rate) {
      return sentiment_mapped_stance(example.sentiment);
    }
    return std::nullopt;
  };
  const auto entity_stage = [&]() -> std::optional<StanceLabel> {
    auto it = config.entity_bias.find(example.target_id);
    if (it != config.entity_bias.end() &&
        stream.next_unit() < it->second.rate) {
      return it->second.biased_label;
    }
    return std::nullopt;
  };

  std::optional<StanceLabel> label;
  if (config.cascade_order == CascadeOrder::kLeakageFirst) {
    label = leakage_stage();
    if (!label) label = entity_stage();
  } else {
    label = entity_stage();
    if (!label) label = leakage_stage();
  }
  if (!label) {
    label = stream.next_unit() < config.base_accuracy
                ? example.stance
                : random_non_gold(example.stance, stream);
  }

  return make_hard_prediction(
      example.id, *label, "simulator",
      sha256_hex("simulator\n" + example.id + "\n" + example.text + "\n" +
                 example.target_id));
}

PredictionSet simulate_batch(const Corpus& corpus,
                             const SimulatorConfig& config) {
  config.validate();
  RandomStream stream(config.seed);
  PredictionSet set;
  for (const Example& ex : corpus.examples()) {
    set.add(simulate_prediction(ex, config, stream));
  }
  return set;
}

}  // namespace thaifactual
